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

#include "pmx/layout.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace pmx {

SpaceLayout::SpaceLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
        if (f.dim < 1) fail_input("factor '" + f.label + "' has dim < 1");
        if (f.trial < 1) fail_input("factor '" + f.label + "' has trial < 1");
        if (!seen.insert(f.label).second) fail_input("duplicate factor label '" + f.label + "'");
    }
    strides_.resize(factors_.size());
    total_dim_ = 1;
    for (int k = size() - 1; k >= 0; --k) {
        strides_[k] = total_dim_;
        total_dim_ *= factors_[k].dim;
    }
}

int SpaceLayout::index_of(const std::string& label) const {
    for (int k = 0; k < size(); ++k)
        if (factors_[k].label == label) return k;
    return -1;
}

std::vector<int> SpaceLayout::indices_of(const std::vector<std::string>& labels) const {
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        int k = index_of(l);
        if (k < 0) fail_input("unknown factor label '" + l + "'");
        out.push_back(k);
    }
    return out;
}

std::vector<std::pair<int, int>> SpaceLayout::trial_blocks() const {
    std::vector<std::pair<int, int>> blocks;
    std::set<int> done;
    int k = 0;
    while (k < size()) {
        int t = factors_[k].trial;
        if (done.count(t)) fail_input("trial factors are not contiguous");
        done.insert(t);
        int first = k;
        while (k < size() && factors_[k].trial == t) ++k;
        blocks.push_back({first, k});
    }
    for (size_t b = 1; b < blocks.size(); ++b)
        if (factors_[blocks[b].first].trial <= factors_[blocks[b - 1].first].trial)
            fail_input("trials are not ascending");
    // every trial carries the same signature multiset (site, role, dim)
    std::multiset<std::tuple<std::string, int, int>> ref;
    for (size_t b = 0; b < blocks.size(); ++b) {
        std::multiset<std::tuple<std::string, int, int>> s;
        for (int k = blocks[b].first; k < blocks[b].second; ++k)
            s.insert({factors_[k].site, (int)factors_[k].role, factors_[k].dim});
        if (b == 0)
            ref = std::move(s);
        else if (s != ref)
            fail_input("trial " + std::to_string(factors_[blocks[b].first].trial) +
                       " signature mismatch");
    }
    return blocks;
}

int SpaceLayout::trial_count() const { return (int)trial_blocks().size(); }

SpaceLayout SpaceLayout::trial_layout(int trial) const {
    std::vector<Factor> fs;
    for (const auto& f : factors_)
        if (f.trial == trial) {
            Factor g = f;
            g.trial = 1;
            fs.push_back(g);
        }
    if (fs.empty()) fail_input("no factors for trial " + std::to_string(trial));
    return SpaceLayout{fs};
}

SpaceLayout SpaceLayout::sub(const std::vector<int>& keep) const {
    std::vector<Factor> fs;
    fs.reserve(keep.size());
    for (int k : keep) fs.push_back(factors_.at(k));
    return SpaceLayout{fs};
}

std::vector<std::string> SpaceLayout::labels() const {
    std::vector<std::string> out;
    for (const auto& f : factors_) out.push_back(f.label);
    return out;
}

std::vector<std::string> SpaceLayout::labels_of_site(const std::string& site) const {
    std::vector<std::string> out;
    for (const auto& f : factors_)
        if (f.site == site) out.push_back(f.label);
    return out;
}

std::vector<std::string> SpaceLayout::labels_of_role(Role role) const {
    std::vector<std::string> out;
    for (const auto& f : factors_)
        if (f.role == role) out.push_back(f.label);
    return out;
}

std::vector<std::string> SpaceLayout::site_names() const {
    std::vector<std::string> out;
    for (const auto& f : factors_)
        if (std::find(out.begin(), out.end(), f.site) == out.end()) out.push_back(f.site);
    return out;
}

bool SpaceLayout::same_dims(const SpaceLayout& other) const {
    if (size() != other.size()) return false;
    for (int k = 0; k < size(); ++k)
        if (factors_[k].dim != other.factors_[k].dim) return false;
    return true;
}

bool SpaceLayout::operator==(const SpaceLayout& other) const {
    if (size() != other.size()) return false;
    for (int k = 0; k < size(); ++k) {
        const auto& a = factors_[k];
        const auto& b = other.factors_[k];
        if (a.label != b.label || a.site != b.site || a.role != b.role || a.trial != b.trial ||
            a.dim != b.dim)
            return false;
    }
    return true;
}

SpaceLayout concat_layouts(const SpaceLayout& a, const SpaceLayout& b) {
    std::vector<Factor> fs = a.factors();
    fs.insert(fs.end(), b.factors().begin(), b.factors().end());
    return SpaceLayout{fs};
}

SpaceLayout replicate_trials(const SpaceLayout& trial, int n) {
    if (trial.trial_count() != 1) fail_input("replicate_trials expects a single-trial layout");
    if (n < 1) fail_input("replicate_trials expects n >= 1");
    std::vector<Factor> fs;
    for (int t = 1; t <= n; ++t)
        for (const auto& f : trial.factors()) {
            Factor g = f;
            g.label = f.label + "@" + std::to_string(t);
            g.trial = t;
            fs.push_back(g);
        }
    return SpaceLayout{fs};
}

}  // namespace pmx
