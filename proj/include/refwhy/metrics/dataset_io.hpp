#pragma once

#include "refwhy/error.hpp"
#include "refwhy/metrics/metric_vector.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace refwhy::metrics {

REFWHY_DEFINE_ERROR(TypeError);

struct IngestReport {
    std::size_t joined = 0;
    std::size_t unmatched = 0;
    std::size_t skipped = 0;  // rows with a non-numeric cell
    std::vector<std::string> unmatched_keys;  // "commit:file"
};

// Joins externally computed product metrics onto `vectors` by (commit, file).
IngestReport ingest_product_metrics(const std::string& csv_path, std::vector<MetricVector>& vectors,
                                    const ReadabilityThresholds& thresholds = {});

// Header: commit,file,<28 process metrics>[,<product columns>]. Product
// columns are written when any vector carries a product block.
void write_metrics_csv(std::ostream& out, const std::vector<MetricVector>& vectors);
std::vector<MetricVector> read_metrics_csv(const std::string& path);

}  // namespace refwhy::metrics
