// Copyright 2026 chernlab developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "chernlab/fredholm.hpp"
#include "json.hpp"

namespace chernlab {

using Json = nlohmann::json;

// Floats are written with 17 significant digits; arrays of scalars (and of
// [re, im] pairs) stay on one line.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(cplx z);
cplx cplx_from_json(const Json& j);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

// {rows, cols, data: row-major [re, im] pairs}
Json to_json(const Mat& a);
Mat mat_from_json(const Json& j);

// {name, dim, degrees, unit_index, mul: [[i,j,k,re,im]], diff: [[i,j,re,im]]};
// a diff entry [i,j,..] is the coefficient of e_i in d(e_j).
Json to_json(const DgAlgebra& A);
AlgebraPtr algebra_from_json(const Json& j);

Json to_json(const CliffordModule& cm);
CliffordModule clifford_from_json(const Json& j);

Json to_json(const CqModule& M);
CqModule cq_module_from_json(const Json& j);
Json to_json(const OddModule& M);
OddModule odd_module_from_json(const Json& j);

Json to_json(const DgAlgebra& A, const MatrixElement& x);
// The algebra is only used to check dimensions.
MatrixElement matrix_element_from_json(const DgAlgebra& A, const Json& j);

// {algebra, kind, terms: [{coeff, slots: [coefficient arrays]}]}
Json to_json(const Chain& c);
Chain chain_from_json(const AlgebraPtr& A, const Json& j);

// Same algebra up to exact equality of the structure data.
bool same_algebra(const DgAlgebra& a, const DgAlgebra& b);

}  // namespace chernlab
