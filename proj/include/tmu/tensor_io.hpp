#pragma once

// Serialization of TensorValue lists for the command line front end.

#include <string>
#include <vector>

#include "tmu/tensor.hpp"

namespace tmu {

// JSON array; components flattened row-major with a "shape" entry.
std::string tensors_to_json(const std::vector<TensorValue>& ts);
std::vector<TensorValue> tensors_from_json(const std::string& text);
// One row per component: name,variance,index,value
std::string tensors_to_csv(const std::vector<TensorValue>& ts);

}  // namespace tmu
