#pragma once

#include <stdexcept>
#include <string>

namespace sr3t {

/// Base of every error raised by the library. The category drives the CLI
/// exit code: validation-class errors exit 2, everything else 3.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
	virtual bool is_validation() const { return true; }
};

/// Bad or inconsistent configuration value; the message names the key.
class ConfigError : public Error {
public:
	using Error::Error;
};

/// Argument outside an operation's domain.
class InputError : public Error {
public:
	using Error::Error;
};

/// A required calibration label or anchor is missing.
class CalibrationIncompleteError : public Error {
public:
	using Error::Error;
};

/// Calibration anchors that collapse a linear map (min == max).
class DegenerateCalibrationError : public Error {
public:
	using Error::Error;
};

/// Key or position outside the finger's reach.
class ReachError : public Error {
public:
	ReachError(const std::string& what, double max_reachable_x)
		: Error(what), max_reachable_x_(max_reachable_x) {}
	double max_reachable_x() const { return max_reachable_x_; }

private:
	double max_reachable_x_;
};

/// Requested motion beyond the joint range.
class RangeError : public Error {
public:
	using Error::Error;
};

/// File could not be opened or parsed.
class IoError : public Error {
public:
	using Error::Error;
	bool is_validation() const override { return false; }
};

} // namespace sr3t
