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

// Tier template functions. Each one is a pure function of its tier and the
// phrase table: equal inputs give byte-equal paragraphs. Values that are
// absent or PreferNotToAnswer/Unsure are omitted, never verbalized.

#ifndef TWINBENCH_TEMPLATES_HPP_
#define TWINBENCH_TEMPLATES_HPP_

#include <optional>
#include <string>

#include "twinbench/mapping.hpp"
#include "twinbench/persona.hpp"

namespace twinbench {

std::string render_demographic_template(const DemographicTier& tier,
                                        const MappingTable& mapping = MappingTable::builtin());

// Sentences follow schema column order. Returns "" when every field is absent.
std::string render_behavioral_template(const BehavioralTier& tier,
                                       const MappingTable& mapping = MappingTable::builtin());

// One sentence per trait, always in Extraverted, Agreeable, Conscientious,
// Stable, Open order.
std::string render_psychological_template(const PsychologicalTier& tier,
                                          const MappingTable& mapping = MappingTable::builtin());

// Present, non-empty tiers joined with one blank line, in dem/beh/psy order.
std::string compose_prompt(const std::optional<std::string>& demographic,
                           const std::optional<std::string>& behavioral,
                           const std::optional<std::string>& psychological);

}  // namespace twinbench

#endif  // TWINBENCH_TEMPLATES_HPP_
