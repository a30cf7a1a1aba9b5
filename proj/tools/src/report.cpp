#include "acrnn_app/report.hpp"

#include <fmt/format.h>

#include <ostream>

#include "acrnn/errors.hpp"

namespace acrnn::app {

std::string number_cell(double value) { return fmt::format("{:.6g}", value); }

std::string mean_std_cell(double mean, double std) { return fmt::format("{:.4g}±{:.4g}", mean, std); }

void write_metrics_table(std::ostream& out, const std::vector<EvalReport>& reports) {
  if (reports.empty()) return;
  const EvalReport& first = reports.front();
  out << "model\tfold";
  for (const MetricSummary& m : first.metrics) out << '\t' << m.name;
  out << '\n';
  for (const EvalReport& report : reports) {
    if (report.metrics.size() != first.metrics.size()) {
      throw ContractError("write_metrics_table: reports carry different metric sets");
    }
    for (std::size_t f = 0; f < report.folds; ++f) {
      out << report.model << '\t' << (f + 1);
      for (const MetricSummary& m : report.metrics) out << '\t' << number_cell(m.per_fold.at(f));
      out << '\n';
    }
    out << report.model << "\tmean±std";
    for (const MetricSummary& m : report.metrics) out << '\t' << mean_std_cell(m.mean, m.std);
    out << '\n';
  }
}

void write_history(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch\ttrain_mse\tval_mse\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << '\t' << fmt::format("{:.17g}", r.train_loss) << '\t' << fmt::format("{:.17g}", r.val_loss)
        << '\n';
  }
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << "step\tseries\tvalue\n";
  for (const TraceRecord& r : records) out << r.step << '\t' << r.series << '\t' << fmt::format("{:.17g}", r.value) << '\n';
}

}  // namespace acrnn::app
