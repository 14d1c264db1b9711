// Copyright 2026 The twinbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWINBENCH_EMBEDDING_VECTOR_HPP_
#define TWINBENCH_EMBEDDING_VECTOR_HPP_

#include <string>
#include <vector>

namespace twinbench {

// A text embedding tagged with the model that produced it. Vectors from
// different models are never compared.
class EmbeddingVector {
 public:
  // Throws Error(kInvalidArgument) on empty or non-finite values.
  EmbeddingVector(std::string model_id, std::vector<double> values);

  const std::string& model_id() const { return model_id_; }
  size_t dims() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::string model_id_;
  std::vector<double> values_;
};

}  // namespace twinbench

#endif  // TWINBENCH_EMBEDDING_VECTOR_HPP_
