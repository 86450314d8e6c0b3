// Copyright 2026 The asmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "asmpc/oracle.hpp"
#include "golden.hpp"

namespace asmpc {
namespace {

double eval1(const std::string& text, const PlainEnvironment& in) {
  const auto prog = parse_program(text);
  return eval_plain(prog, in).at(prog.outputs.front());
}

ErrorCode oracle_error(const std::string& text, const PlainEnvironment& in) {
  try {
    eval1(text, in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUsage;
}

TEST(Oracle, Examples) {
  EXPECT_EQ(eval1("f = pow(x, exps=[2])", {{"x", 3}}), 9.0);
  EXPECT_DOUBLE_EQ(eval1("f = log(x)", {{"x", -8}}), golden::kLnMinus8);
  EXPECT_EQ(eval1("f = cmp(x, y)", {{"x", 1}, {"y", 1}}), 0.0);
  EXPECT_EQ(eval1("f = cmp(x, y)", {{"x", 2}, {"y", 1}}), 1.0);
  EXPECT_EQ(eval1("f = cmp(x, y)", {{"x", 1}, {"y", 1 + 1e-12}}), 0.0);
  EXPECT_EQ(eval1("f = pre(x, alpha=0.5)", {{"x", 4}}), 2.0);
  EXPECT_EQ(eval1("f = pse(x, y)", {{"x", 0}, {"y", 5}}), 0.0);
  EXPECT_EQ(eval1("f = pse(x, y)", {{"x", -2}, {"y", 3}}), -8.0);
  EXPECT_EQ(eval1("f = linear(x, y, coeffs=[2, 3], bias=-1)", {{"x", 1}, {"y", 2}}), 7.0);
  EXPECT_EQ(eval1("f = addres(x)", {{"x", 4}}), 4.0);
}

TEST(Oracle, SeriesMatchesFrozenValues) {
  EXPECT_NEAR(eval1("f = asin(x)", {{"x", 0.5}}), golden::kAsinSeries15Half, 1e-15);
  EXPECT_NEAR(eval1("f = acos(x)", {{"x", 0.5}}), golden::kAcosSeries15Half, 1e-15);
  EXPECT_NEAR(eval1("f = atan(x)", {{"x", 0.5}}), golden::kAtanSeries15Half, 1e-15);
  EXPECT_NEAR(eval1("f = sec(x)", {{"x", 1.0 / 3}}), golden::kSecOneThird, 1e-15);
  EXPECT_NEAR(eval1("f = csc(x)", {{"x", 1.0 / 3}}), golden::kCscOneThird, 1e-15);
}

TEST(Oracle, EvaluatesDagInDependencyOrder) {
  const auto out = eval_plain(parse_program("b = mul(a, x)\na = linear(x, bias=1)\n"), {{"x", 2}});
  EXPECT_EQ(out.at("a"), 3.0);
  EXPECT_EQ(out.at("b"), 6.0);
  EXPECT_EQ(out.at("x"), 2.0);
}

TEST(Oracle, DomainErrorsNameTheNode) {
  EXPECT_EQ(oracle_error("f = log(x)", {{"x", 0}}), ErrorCode::kOracleDomainError);
  EXPECT_EQ(oracle_error("f = div(x, y)", {{"x", 1}, {"y", 0}}), ErrorCode::kOracleDomainError);
  EXPECT_EQ(oracle_error("f = pre(x, alpha=0.5)", {{"x", -1}}), ErrorCode::kOracleDomainError);
  EXPECT_EQ(oracle_error("f = mulres(u)", {{"u", 0}}), ErrorCode::kZeroSecretUnderMss);
  EXPECT_EQ(oracle_error("f = mul(x, y)", {{"x", 1}}), ErrorCode::kUsage);
  try {
    eval1("g = log(x)", {{"x", 0}});
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'g'"), std::string::npos);
  }
}

}  // namespace
}  // namespace asmpc
