// Copyright 2026 The procmat developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pmx/common.hpp"

namespace pmx {

enum class Role { input, output };

// One tensor factor of a labeled operator space. `trial` is 1-based; repeated
// trials of the same experiment share the per-trial signature (site, role, dim).
struct Factor {
    std::string label;
    std::string site;
    Role role = Role::input;
    int trial = 1;
    int dim = 1;
};

// Ordered list of tensor factors. Matrix indices are row-major mixed-radix over
// the factors, with factor 0 most significant.
class SpaceLayout {
  public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<Factor> factors);

    int size() const { return (int)factors_.size(); }
    long total_dim() const { return total_dim_; }
    const Factor& factor(int k) const { return factors_.at(k); }
    const std::vector<Factor>& factors() const { return factors_; }

    // Index of the factor with this label, or -1.
    int index_of(const std::string& label) const;
    // Indices of all given labels; throws on an unknown label.
    std::vector<int> indices_of(const std::vector<std::string>& labels) const;

    // Stride of factor k in the row-major mixed-radix index.
    long stride(int k) const { return strides_.at(k); }

    // Trials present, in factor order. Requires each trial's factors to be
    // contiguous and trials ascending; returns [first, last) factor ranges.
    std::vector<std::pair<int, int>> trial_blocks() const;
    int trial_count() const;
    // Layout of a single trial, with the trial index rebased to 1.
    SpaceLayout trial_layout(int trial) const;

    // Sublayout keeping the given factor positions in their current order.
    SpaceLayout sub(const std::vector<int>& keep) const;

    // Labels of all factors, or of all factors matching a site/role filter.
    std::vector<std::string> labels() const;
    std::vector<std::string> labels_of_site(const std::string& site) const;
    std::vector<std::string> labels_of_role(Role role) const;

    // Distinct site names in declaration order (single-trial helper).
    std::vector<std::string> site_names() const;

    bool same_dims(const SpaceLayout& other) const;
    bool operator==(const SpaceLayout& other) const;

  private:
    std::vector<Factor> factors_;
    std::vector<long> strides_;
    long total_dim_ = 1;
};

// Layout concatenation with label-collision checking (used by kron).
SpaceLayout concat_layouts(const SpaceLayout& a, const SpaceLayout& b);

// n copies of a single-trial layout; labels get an "@k" suffix and trial
// indices count 1..n. Trial 1 keeps the "@1" suffix so labels stay distinct.
SpaceLayout replicate_trials(const SpaceLayout& trial, int n);

}  // namespace pmx
