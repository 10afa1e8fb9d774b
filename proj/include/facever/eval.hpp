// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/config.hpp"
#include "facever/dataset.hpp"
#include "facever/manifest.hpp"

#include <span>
#include <string>
#include <vector>

namespace facever {

enum class Method { kCsf, k2D2G, k2D2GC };

inline constexpr Method kAllMethods[] = {Method::kCsf, Method::k2D2G, Method::k2D2GC};

const char* to_string(Method m);
Method method_from_string(const std::string& text);

struct Verdict {
  bool genuine = false;
  bool accepted = false;
};

/// Percentages: FAR over impostor trials, FRR over genuine trials, TER = FAR + FRR.
struct Rates {
  double far = 0.0;
  double frr = 0.0;
  double ter = 0.0;
};

Rates compute_rates(std::span<const Verdict> verdicts);

struct MethodResult {
  Method method = Method::k2D2G;
  ProtocolConfig config = ProtocolConfig::kI;
  Rates rates;
  double verify_us = 0.0;  // mean per verification
  double train_ms = 0.0;
  std::size_t genuine_trials = 0;
  std::size_t impostor_trials = 0;
  std::string error;  // non-empty when the method failed

  bool ok() const { return error.empty(); }
};

struct EvalReport {
  std::vector<MethodResult> rows;

  /// Header `method,config,far,frr,ter,verify_us,train_ms`; numbers use the
  /// shortest round-trip form. Failed methods keep their row with empty fields.
  std::string to_csv() const;
  /// Aligned table with one line per method, failures spelled out.
  std::string to_text() const;
};

inline constexpr const char* kReportHeader = "method,config,far,frr,ter,verify_us,train_ms";

struct EvalOptions {
  bool measure_timing = true;  // false leaves timing columns at zero
  int timing_calls = 1000;
  int warmup_calls = 20;
};

/// Trains each method on client_train, calibrates on the evaluation roles and
/// reports test-role rates. A failing method is recorded and the others run.
EvalReport run_comparison(const LoadedDataset& data, ProtocolConfig config,
                          std::span<const Method> methods, const RunConfig& run,
                          const EvalOptions& options = {});

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

}  // namespace facever
