#pragma once

#include <stdexcept>
#include <string>

namespace rydwire {

/// Base class for every error raised by the library. `code()` is a stable
/// machine-readable tag; the CLI writes it into its error record.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string &message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string &code() const noexcept { return code_; }

  private:
    std::string code_;
};

struct UnsupportedGraph : Error {
    explicit UnsupportedGraph(const std::string &name)
        : Error("unsupported_graph", "unsupported graph '" + name + "'") {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string &message) : Error("invalid_argument", message) {}
};

struct DegenerateGeometry : Error {
    explicit DegenerateGeometry(const std::string &message) : Error("degenerate_geometry", message) {}
};

struct SingularCoupling : Error {
    explicit SingularCoupling(const std::string &message) : Error("singular_coupling", message) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string &message) : Error("dimension_mismatch", message) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string &message) : Error("too_large", message) {}
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string &message) : Error("non_convergence", message) {}
};

struct NotNormalized : Error {
    explicit NotNormalized(const std::string &message) : Error("not_normalized", message) {}
};

/// No shot (or no amplitude weight) satisfied the wire AF condition.
struct EmptyPostselection : Error {
    EmptyPostselection(unsigned long long kept, unsigned long long total)
        : Error("empty_postselection",
                "post-selection kept " + std::to_string(kept) + " of " + std::to_string(total) + " events"),
          kept_events(kept),
          total_events(total) {}

    unsigned long long kept_events;
    unsigned long long total_events;
};

}  // namespace rydwire
