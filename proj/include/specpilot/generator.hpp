#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specpilot/evaluator.hpp"
#include "specpilot/exec_harness.hpp"
#include "specpilot/retrieval.hpp"
#include "specpilot/script_dsl.hpp"
#include "specpilot/spec_model.hpp"

namespace specpilot {

struct GenerationRequest {
    SpecDocument spec;
    std::vector<RetrievedPair> retrieved;  // sorted by score descending
    std::vector<Finding> prior_findings;   // empty on iteration 1
    int iteration = 1;
};

/// Text-in/text-out candidate producer. The orchestrator, not the
/// backend, decides acceptance.
class GenerationBackend {
  public:
    virtual ~GenerationBackend() = default;

    /// Throws TransportError when a remote backend cannot deliver.
    virtual std::string generate(const GenerationRequest& request) = 0;
};

/// Deterministic retrieval-template generation: adapts the top-1
/// retrieved script to the spec (header, data bindings, step alignment
/// by index, stub synthesis for unaligned steps, retitling,
/// renumbering). With no retrieval, emits a skeleton of stub steps.
/// Output always parses.
std::string generate_template(const GenerationRequest& request, const ApiRegistry& registry);

/// Deterministic prompt for a remote text-generation backend, with
/// delimited SPECIFICATION / EXAMPLE / GRAMMAR / FINDINGS / INSTRUCTION
/// sections. FINDINGS is omitted when there are no prior findings.
std::string assemble_prompt(const GenerationRequest& request);

/// Registry name with minimal Levenshtein distance (ties broken
/// lexicographically); nullopt when the minimum exceeds 2.
std::optional<std::pair<std::string, int>> nearest_api(const std::string& name,
                                                       const ApiRegistry& registry);

/// Deterministic finding-driven fixes: unknown API names are replaced
/// via nearest_api or downgraded to comments; assert-less steps gain a
/// status assert on their last bound call result; a missing teardown
/// gains a reset_system call. Never changes the step count; idempotent
/// once the findings are gone.
TestScript repair(const TestScript& script, const std::vector<Finding>& findings,
                  const ApiRegistry& registry);

class TemplateBackend final : public GenerationBackend {
  public:
    explicit TemplateBackend(const ApiRegistry& registry) : registry_(registry) {}

    std::string generate(const GenerationRequest& request) override
    {
        return generate_template(request, registry_);
    }

  private:
    const ApiRegistry& registry_;
};

/// Stub client for a remote text-generation endpoint:
///   POST /generate, text/plain prompt body -> 200, script text body.
class RemoteBackend final : public GenerationBackend {
  public:
    RemoteBackend(std::string host, int port, int timeout_s)
        : host_(std::move(host)), port_(port), timeout_s_(timeout_s)
    {}

    std::string generate(const GenerationRequest& request) override;

  private:
    std::string host_;
    int port_;
    int timeout_s_;
};

}  // namespace specpilot
