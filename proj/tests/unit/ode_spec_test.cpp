#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mechband/errors.hpp"
#include "mechband/ode_spec.hpp"

namespace mechband {
namespace {

ErrorCode code_of(const OdeSpec& spec) {
  try {
    validate_spec(spec);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected validate_spec to throw";
  return ErrorCode::kInvalidArgument;
}

TEST(Dimensions, LorenzShapedCounts) {
  Dimensions d{50, 3, 3, 1, 1, 0};
  EXPECT_EQ(d.block_size(), 6u);
  EXPECT_EQ(d.governing_rows(), 150u);
  EXPECT_EQ(d.initial_rows(), 3u);
  EXPECT_EQ(d.smoothness_rows(), 588u);
  EXPECT_EQ(d.constraints(), 741u);
  EXPECT_EQ(d.unknowns(), 300u);
}

TEST(Dimensions, SinglePointCounts) {
  Dimensions d{1, 1, 1, 0, 1, 0};
  EXPECT_EQ(d.constraints(), 2u);
  EXPECT_EQ(d.unknowns(), 1u);
  EXPECT_EQ(d.smoothness_rows(), 0u);
}

TEST(Dimensions, TwoPointCounts) {
  Dimensions d{2, 1, 1, 0, 1, 0};
  EXPECT_EQ(d.constraints(), 5u);
  EXPECT_EQ(d.unknowns(), 2u);
}

TEST(OdeSpec, FlatOffsetsFollowRowMajorLayout) {
  Dimensions d{3, 2, 2, 2, 2, 1};
  const OdeSpec spec = OdeSpec::zeros(d);
  EXPECT_EQ(spec.coefficients.size(), 3u * 2 * 2 * 3);
  EXPECT_EQ(spec.coefficient_index(1, 1, 0, 2), ((1 * 2 + 1) * 2 + 0) * 3 + 2u);
  EXPECT_EQ(spec.constant_index(2, 1), 5u);
  EXPECT_EQ(spec.initial_index(1, 1, 1), 7u);
  EXPECT_EQ(spec.steps.size(), 2u);
}

TEST(OdeSpec, ToySpecIsValid) {
  EXPECT_EQ(validate_spec(fixtures::toy_spec()), fixtures::toy_spec().dims);
}

TEST(ValidateSpec, RejectsNonPositiveStep) {
  OdeSpec spec = fixtures::toy_spec();
  spec.steps[0] = 0.0;
  EXPECT_EQ(code_of(spec), ErrorCode::kNonPositiveStep);
  spec.steps[0] = -0.1;
  EXPECT_EQ(code_of(spec), ErrorCode::kNonPositiveStep);
}

TEST(ValidateSpec, RejectsNonPositiveWeight) {
  OdeSpec spec = fixtures::toy_spec();
  spec.weights.smoothness = 0.0;
  EXPECT_EQ(code_of(spec), ErrorCode::kNonPositiveWeight);
}

TEST(ValidateSpec, RejectsNonFiniteEntries) {
  OdeSpec spec = fixtures::toy_spec();
  spec.constants[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(code_of(spec), ErrorCode::kNonFiniteInput);
  spec = fixtures::toy_spec();
  spec.coefficients[0] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of(spec), ErrorCode::kNonFiniteInput);
}

TEST(ValidateSpec, RejectsShapeMismatch) {
  OdeSpec spec = fixtures::toy_spec();
  spec.constants.pop_back();
  EXPECT_EQ(code_of(spec), ErrorCode::kShapeMismatch);
}

TEST(ValidateSpec, RejectsInvalidDimensions) {
  OdeSpec spec = fixtures::toy_spec();
  spec.dims.init_time_points = 3;
  EXPECT_EQ(code_of(spec), ErrorCode::kInvalidDimensions);
  spec = fixtures::toy_spec();
  spec.dims.init_order = 1;
  EXPECT_EQ(code_of(spec), ErrorCode::kInvalidDimensions);
}

TEST(ValidateSpec, RejectsUnderDeterminedSystem) {
  // One point, two variables of order 1, a single equation and one initial
  // value: 2 rows for 4 unknowns.
  Dimensions d{1, 2, 1, 1, 1, 0};
  const OdeSpec spec = OdeSpec::zeros(d);
  EXPECT_EQ(code_of(spec), ErrorCode::kUnderDetermined);
}

TEST(TimeGrid, IsCumulativeSumOfSteps) {
  Dimensions d{4, 1, 1, 0, 1, 0};
  OdeSpec spec = OdeSpec::zeros(d);
  spec.steps = {0.5, 0.25, 1.0};
  const std::vector<double> t = time_grid(spec);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_DOUBLE_EQ(t[0], 0.0);
  EXPECT_DOUBLE_EQ(t[1], 0.5);
  EXPECT_DOUBLE_EQ(t[2], 0.75);
  EXPECT_DOUBLE_EQ(t[3], 1.75);
}

TEST(Errors, MessageCarriesCodeName) {
  const Error e(ErrorCode::kUnderDetermined, "m < n");
  EXPECT_EQ(e.code(), ErrorCode::kUnderDetermined);
  EXPECT_NE(std::string(e.what()).find("UnderDetermined"), std::string::npos);
}

}  // namespace
}  // namespace mechband
