#include <gtest/gtest.h>

#include "april/text.hpp"

using april::text::split_lines;
using april::text::split_sentences;
using april::text::tokenize;

TEST(Tokenize, LowercasesAndSplitsOnNonAlnum) {
  const std::vector<std::string> want{"the", "u", "s", "economy", "grew", "3", "5", "in", "2001"};
  EXPECT_EQ(tokenize("The U.S. economy grew 3.5% in 2001!"), want);
}

TEST(Tokenize, EmptyAndPunctuationOnly) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" ,.;-- ").empty());
}

TEST(Tokenize, KeepsUtf8BytesInsideTokens) {
  const auto t = tokenize("Caf\xc3\xa9 au lait");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], "caf\xc3\xa9");
}

TEST(SplitSentences, TerminatorsFollowedByWhitespace) {
  const auto s = split_sentences("One two. Three four! Five six? Seven");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], "One two.");
  EXPECT_EQ(s[3], "Seven");
}

TEST(SplitSentences, AbbreviationsAndInitialsDoNotSplit) {
  const auto s = split_sentences("Mr. Smith met Dr. J. Doe at 5 p.m. today. They talked.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1], "They talked.");
}

TEST(SplitSentences, DecimalsAndClosingQuotes) {
  const auto s = split_sentences("Prices rose 3.5 percent. \"It is over.\" He left.");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1], "\"It is over.\"");
}

TEST(SplitSentences, BlankLineEndsSentence) {
  const auto s = split_sentences("A heading without stop\n\nBody text here.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], "A heading without stop");
}

TEST(SplitLines, DropsBlankLines) {
  const auto s = split_lines("first line\n\n  second line  \n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1], "second line");
}
