#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace specdpc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSquare : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class NotPositiveSemidefinite : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Invalid constructor or model parameters.
class BadParams : public Error {
public:
    using Error::Error;
};

/// Per-node rank of the density varies. Carries the rank at every grid node.
class RankNotConstant : public Error {
public:
    RankNotConstant(std::vector<std::size_t> profile, std::size_t median_rank)
        : Error("rank of the spectral density is not constant over the grid"),
          profile_(std::move(profile)), median_rank_(median_rank) {}

    const std::vector<std::size_t>& profile() const noexcept { return profile_; }
    std::size_t median_rank() const noexcept { return median_rank_; }

private:
    std::vector<std::size_t> profile_;
    std::size_t median_rank_;
};

/// Adjacent eigenvectors are (numerically) orthogonal, so phase alignment is undefined.
class ChannelCollapse : public Error {
public:
    ChannelCollapse(std::size_t node, std::size_t channel)
        : Error("eigenvector discontinuity at node " + std::to_string(node) + ", channel " +
                std::to_string(channel)),
          node_(node), channel_(channel) {}

    std::size_t node() const noexcept { return node_; }
    std::size_t channel() const noexcept { return channel_; }

private:
    std::size_t node_;
    std::size_t channel_;
};

class LogDivergence : public Error {
public:
    using Error::Error;
};

/// lambda_r <= 0 at some grid node; the log-integral is -inf at grid scale.
class NonpositiveEigenvalue : public Error {
public:
    NonpositiveEigenvalue(std::vector<std::size_t> nodes, double finite_part)
        : Error("nonpositive eigenvalue at " + std::to_string(nodes.size()) + " grid node(s)"),
          nodes_(std::move(nodes)), finite_part_(finite_part) {}

    const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
    /// Quadrature over the nodes where every eigenvalue is positive.
    double finite_part() const noexcept { return finite_part_; }

private:
    std::vector<std::size_t> nodes_;
    double finite_part_;
};

class NoNonvanishingMinor : public Error {
public:
    NoNonvanishingMinor(std::vector<std::size_t> best, double min_det)
        : Error("no principal minor of the requested order stays away from zero"),
          best_(std::move(best)), min_det_(min_det) {}

    const std::vector<std::size_t>& best_indices() const noexcept { return best_; }
    double min_det() const noexcept { return min_det_; }

private:
    std::vector<std::size_t> best_;
    double min_det_;
};

class RankOutOfRange : public Error {
public:
    using Error::Error;
};

class ExcessTailEnergy : public Error {
public:
    explicit ExcessTailEnergy(double tail)
        : Error("discarded filter coefficient energy " + std::to_string(tail) +
                " exceeds the configured limit"),
          tail_(tail) {}

    double tail_energy() const noexcept { return tail_; }

private:
    double tail_;
};

class UnsimulableModel : public Error {
public:
    using Error::Error;
};

class PathTooShort : public Error {
public:
    using Error::Error;
};

/// Malformed model, covariance or filter file.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace specdpc
