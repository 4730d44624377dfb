#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "acl/errors.hpp"

namespace acl {

// RFC-4180 numeric tables: header row required, '.' decimal, quoted
// fields allowed in the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);
Eigen::MatrixXd to_matrix(const CsvTable& table);

// Column extraction by header name; throws CsvError when absent.
Eigen::VectorXd column_by_name(const CsvTable& table, const std::string& name);
Eigen::MatrixXd drop_column(const CsvTable& table, const std::string& name);

// Full-precision double formatting (round-trips exactly).
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Matrix/vector convenience writers used by the dataset exporter.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& column_ids);
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v, const std::string& name);

// (column_id, cluster_id) tables produced by the cluster command.
struct PartitionCsv {
    std::vector<std::string> column_ids;
    std::vector<int> cluster_ids;
};

PartitionCsv read_partition_csv(const std::string& path);

} // namespace acl
