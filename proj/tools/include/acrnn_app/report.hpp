#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "acrnn/matrix.hpp"
#include "acrnn/train.hpp"

namespace acrnn::app {

// Result files are tab-separated text with one header row.
//
// metrics.tsv   model  fold  <metric>...     fold is 1..k, then a "mean±std" row per model
// history.tsv   epoch  train_mse  val_mse
// trace.tsv     step   series  value          long format, one record per point

/// "0.0101±0.0037" style cell.
std::string mean_std_cell(double mean, double std);
std::string number_cell(double value);

void write_metrics_table(std::ostream& out, const std::vector<EvalReport>& reports);
void write_history(std::ostream& out, const std::vector<EpochRecord>& history);

struct TraceRecord {
  long step = 0;
  std::string series;
  double value = 0.0;
};
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

}  // namespace acrnn::app
