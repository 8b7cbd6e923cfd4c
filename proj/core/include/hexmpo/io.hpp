#pragma once

#include <string>
#include <vector>

#include "hexmpo/fidelity.hpp"
#include "hexmpo/tensor_train.hpp"

namespace hexmpo {

/// Tensor-train checkpoint: one-line JSON header (phys_dim, log_norm, site
/// shapes) followed by the raw little-endian complex128 payload in storage
/// order.
void save_tensor_train(const TensorTrain& tt, const std::string& path);
TensorTrain load_tensor_train(const std::string& path);

/// Columns: step,epsilon,f,chi_max,F_cumulative.
void write_fidelity_csv(const FidelityLog& log, const std::string& path);

/// Generic numeric table with a header row.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hexmpo
