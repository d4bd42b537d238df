#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eventflow {

/// Base of every domain error raised by the library. `module()` names the
/// component that raised it so the CLI can print "<module>: <cause>".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Configuration or file-system problems. The CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// event_catalog / llm_gateway

class GatewayError : public Error {
public:
    GatewayError(const std::string& what, int http_status = 0, std::string raw_output = {})
        : Error("llm_gateway", what), http_status_(http_status), raw_output_(std::move(raw_output)) {}

    /// 0 when the failure was a transport or parse problem.
    int http_status() const noexcept { return http_status_; }
    const std::string& raw_output() const noexcept { return raw_output_; }

private:
    int http_status_;
    std::string raw_output_;
};

class MissingBinding : public Error {
public:
    explicit MissingBinding(const std::string& what) : Error("llm_gateway", what) {}
};

class UnparseableAnswer : public Error {
public:
    UnparseableAnswer(const std::string& what, std::string raw_output)
        : Error("llm_gateway", what), raw_output_(std::move(raw_output)) {}
    const std::string& raw_output() const noexcept { return raw_output_; }

private:
    std::string raw_output_;
};

class UnparseableTime : public Error {
public:
    UnparseableTime(const std::string& what, std::string raw_output)
        : Error("event_catalog", what), raw_output_(std::move(raw_output)) {}
    const std::string& raw_output() const noexcept { return raw_output_; }

private:
    std::string raw_output_;
};

class ClassificationError : public Error {
public:
    ClassificationError(const std::string& what, std::string raw_output)
        : Error("event_catalog", what), raw_output_(std::move(raw_output)) {}
    const std::string& raw_output() const noexcept { return raw_output_; }

private:
    std::string raw_output_;
};

// popularity

class TypeMismatch : public Error {
public:
    explicit TypeMismatch(const std::string& what) : Error("popularity", what) {}
};

// features

class CalendarOutOfRange : public Error {
public:
    explicit CalendarOutOfRange(const std::string& what) : Error("features", what) {}
};

class InsufficientHistory : public Error {
public:
    InsufficientHistory(std::string module, const std::string& what) : Error(std::move(module), what) {}
};

class DegenerateBaseline : public Error {
public:
    explicit DegenerateBaseline(const std::string& what) : Error("features", what) {}
};

class CoverageGap : public Error {
public:
    explicit CoverageGap(const std::string& what) : Error("features", what) {}
};

// forecast_models

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("forecast_models", what) {}
};

class NonFiniteInput : public Error {
public:
    explicit NonFiniteInput(const std::string& what) : Error("forecast_models", what) {}
};

class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& what) : Error("forecast_models", what) {}
};

// rolling_eval

/// R² is undefined for a constant target; the MAE is still available.
class ZeroVariance : public Error {
public:
    ZeroVariance(const std::string& what, double mae) : Error("rolling_eval", what), mae_(mae) {}
    double mae() const noexcept { return mae_; }

private:
    double mae_;
};

/// A model failure inside the rolling loop, tagged with the origin row.
class OriginError : public Error {
public:
    OriginError(std::size_t origin, const std::string& what)
        : Error("rolling_eval", what), origin_(origin) {}
    std::size_t origin() const noexcept { return origin_; }

private:
    std::size_t origin_;
};

// attribution

class SchemaMismatch : public Error {
public:
    explicit SchemaMismatch(const std::string& what) : Error("attribution", what) {}
};

// synth_bench

class ConfigInvalid : public ConfigError {
public:
    explicit ConfigInvalid(const std::string& what) : ConfigError("synth_bench", what) {}
};

}  // namespace eventflow
