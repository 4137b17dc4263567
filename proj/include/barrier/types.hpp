#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace barrier {

/** Scalar type */
using scalar_t = double;

/** Dense column vector templated on scalar */
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/** Row-major dense matrix; one instance per row */
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using vector_t = Vector<scalar_t>;
using matrix_t = Matrix<scalar_t>;

/** Boolean class labels, TRUE = barrier present */
using labels_t = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class BarrierKind { Economic, Cultural, Geographical, TimeZone, Political };

/// Table order used throughout reports.
inline constexpr std::array<BarrierKind, 5> kAllBarriers = {
    BarrierKind::Economic, BarrierKind::Cultural, BarrierKind::Geographical,
    BarrierKind::TimeZone, BarrierKind::Political};

/// File-name slug: economic, cultural, geographical, time-zone, political.
std::string_view barrier_slug(BarrierKind kind);
/// Display name: Economic, Cultural, Geographical, Time Zone, Political.
std::string_view barrier_display_name(BarrierKind kind);
/// Accepts slugs and display names, case-insensitively.
std::optional<BarrierKind> parse_barrier(std::string_view text);

}  // namespace barrier
