// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "snapnet/dualquat.hpp"
#include "snapnet/line_axis.hpp"

// Shared worked-example fixture: four poses on the Study quadric whose
// relative displacements form a rotation quadrilateral with known axes,
// everted axes and DH data.
namespace fixture {

using snapnet::DualQuaternion;
using snapnet::LineAxis;
using snapnet::Quaternion;
using snapnet::Vec3;

inline DualQuaternion p0() { return {{1, 0, 0, 0}, {0, 0, 0, 0}}; }
inline DualQuaternion p1() { return {{1, 0, 0, 1}, {0, -1, -2, 0}}; }
inline DualQuaternion p2() { return {{1, 0, -1, 2}, {-3, 0, -1, 1}}; }
inline DualQuaternion p3() { return {{1, 0, -1, 0}, {0, 1, 0, 1}}; }

inline DualQuaternion r0() { return {{1, 0, 0, 1}, {0, -1, -2, 0}}; }
inline DualQuaternion r1() { return {{3, 1, -1, 1}, {0, -2, 3, 5}}; }
inline DualQuaternion r2() { return {{2, 2, 0, -2}, {0, 1, 6, 1}}; }
inline DualQuaternion r3() { return {{1, 0, 1, 0}, {0, -1, 0, -1}}; }

inline LineAxis R0() { return {Vec3(0, 0, 1), Vec3(-1, -2, 0)}; }
inline LineAxis R1() { return {Vec3(1, -1, 1), Vec3(-2, 3, 5)}; }
inline LineAxis R2() { return {Vec3(2, 0, -2), Vec3(1, 6, 1)}; }
inline LineAxis R3() { return {Vec3(0, 1, 0), Vec3(-1, 0, -1)}; }

}  // namespace fixture
