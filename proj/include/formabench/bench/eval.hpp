#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "formabench/bench/dataset.hpp"
#include "formabench/errors.hpp"
#include "formabench/metrics.hpp"
#include "formabench/model_client.hpp"
#include "formabench/pipelines.hpp"

namespace formabench {

struct EvalOptions {
  TaskOutcomeOptions outcome;
  PipelineOptions pipeline;
  PromptCatalog catalog = PromptCatalog::builtin();
  std::size_t workers = 1;
};

struct TranscriptRecord {
  std::string task_id;
  std::string pipeline;
  std::string text;
};

struct Report {
  std::vector<EvalRecord> records;
  Summary summary;
  std::vector<TranscriptRecord> transcripts;
};

namespace detail {

inline EvalRecord evaluate_one(const TaskInstance& task, PipelineTag tag,
                               Client& client, const EvalOptions& options,
                               TranscriptRecord* transcript) {
  EvalRecord record;
  record.task_id = task.task_id;
  record.pipeline = to_string(tag);

  Domain domain;
  Problem gt;
  try {
    domain = parse_domain(task.domain_text);
    gt = parse_problem(task.gt_problem_text, domain);
  } catch (const PddlError& e) {
    record.error = std::string("bad-ground-truth: ") + e.what();
    if (!is_formalizer(tag)) record.outcome.planner_success = std::nullopt;
    else record.outcome.planner_success = false;
    return record;
  }

  PipelineArtifact artifact;
  artifact.plan_pipeline = !is_formalizer(tag);
  try {
    PipelineOutput output = run_pipeline(tag, task, client, options.catalog,
                                         options.pipeline);
    record.tokens = output.tokens;
    if (transcript != nullptr) {
      transcript->task_id = task.task_id;
      transcript->pipeline = record.pipeline;
      transcript->text = render_transcript(output);
    }
    if (output.kind == PipelineOutput::Kind::PlanSteps) {
      artifact.kind = PipelineArtifact::Kind::PlanSteps;
      artifact.plan = *output.plan;
    } else {
      artifact.kind = PipelineArtifact::Kind::ProblemText;
      artifact.problem_text = output.problem_text;
    }
  } catch (const ExtractionError& e) {
    record.error = std::string("extraction-error: ") + e.what();
    artifact.kind = PipelineArtifact::Kind::ExtractionFailed;
  } catch (const std::exception& e) {
    record.error = std::string("client-error: ") + e.what();
    artifact.kind = PipelineArtifact::Kind::ExtractionFailed;
  }

  Plan plan;
  record.outcome = task_outcome(artifact, domain, gt, options.outcome, &plan);
  if (record.outcome.compilation_success &&
      (record.outcome.simulation_success ||
       (record.outcome.planner_success && *record.outcome.planner_success) ||
       artifact.kind == PipelineArtifact::Kind::PlanSteps)) {
    record.plan_length = plan.steps.size();
  }

  if (artifact.kind == PipelineArtifact::Kind::ProblemText &&
      record.outcome.compilation_success) {
    Problem pred = parse_problem(artifact.problem_text, domain);
    record.scene = scene_scores(pred, gt, task.aliases);
  }
  return record;
}

inline std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace detail

// Evaluates every (task, pipeline) pair; partial failures are recorded per
// task and never abort the run.
inline Report run_eval(const std::vector<TaskInstance>& tasks,
                       const std::vector<PipelineTag>& tags, Client& client,
                       const EvalOptions& options = {}) {
  struct Job {
    const TaskInstance* task;
    PipelineTag tag;
  };
  std::vector<Job> jobs;
  for (const auto& task : tasks) {
    for (PipelineTag tag : tags) jobs.push_back({&task, tag});
  }

  Report report;
  report.records.resize(jobs.size());
  report.transcripts.resize(jobs.size());

  std::size_t workers = std::max<std::size_t>(1, options.workers);
  workers = std::min(workers, jobs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      report.records[i] = detail::evaluate_one(
          *jobs[i].task, jobs[i].tag, client, options, &report.transcripts[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          report.records[i] =
              detail::evaluate_one(*jobs[i].task, jobs[i].tag, client,
                                   options, &report.transcripts[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  report.summary = aggregate(report.records);
  return report;
}

// Emits summary.json and records.csv, both deterministic given the records
// (internal sort by task_id, then pipeline).
inline void write_report(const Summary& summary,
                         std::vector<EvalRecord> records,
                         const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              return a.task_id != b.task_id ? a.task_id < b.task_id
                                            : a.pipeline < b.pipeline;
            });

  nlohmann::ordered_json j;
  j["pipelines"] = nlohmann::ordered_json::object();
  for (const auto& [tag, s] : summary.pipelines) {
    nlohmann::ordered_json p;
    p["tasks"] = s.task_count;
    p["compilation_success_rate"] = s.compilation_rate;
    p["planner_success_rate"] = s.planner_rate;
    p["planner_defined"] = s.planner_defined;
    p["simulation_success_rate"] = s.simulation_rate;
    p["resource_limited"] = s.resource_limited;
    auto prf_json = [](const Prf& x) {
      return nlohmann::ordered_json{
          {"precision", x.precision}, {"recall", x.recall}, {"f1", x.f1}};
    };
    p["scene"] = {{"objects", prf_json(s.mean_scene.objects)},
                  {"init", prf_json(s.mean_scene.init)},
                  {"goal", prf_json(s.mean_scene.goal)}};
    p["scene_count"] = s.scene_count;
    p["tokens"] = {{"mean_prompt", s.mean_prompt_tokens},
                   {"mean_response", s.mean_response_tokens},
                   {"mean_total", s.mean_total_tokens},
                   {"mean_calls", s.mean_calls}};
    p["success_per_token"] = s.success_per_token;
    p["mean_plan_length"] = s.mean_plan_length;
    j["pipelines"][tag] = p;
  }
  {
    std::ofstream out(out_dir / "summary.json");
    if (!out) throw Error("cannot write " + (out_dir / "summary.json").string());
    out << j.dump(2) << '\n';
  }

  std::ofstream csv(out_dir / "records.csv");
  if (!csv) throw Error("cannot write " + (out_dir / "records.csv").string());
  csv << "task_id,pipeline,compilation_success,planner_success,"
         "simulation_success,resource_limited,"
         "objects_precision,objects_recall,objects_f1,"
         "init_precision,init_recall,init_f1,"
         "goal_precision,goal_recall,goal_f1,"
         "prompt_tokens,response_tokens,calls,plan_length,error\n";
  for (const auto& r : records) {
    csv << r.task_id << ',' << r.pipeline << ','
        << (r.outcome.compilation_success ? 1 : 0) << ',';
    if (r.outcome.planner_success.has_value()) {
      csv << (*r.outcome.planner_success ? 1 : 0);
    }
    csv << ',' << (r.outcome.simulation_success ? 1 : 0) << ','
        << (r.outcome.resource_limited ? 1 : 0) << ',';
    if (r.scene.has_value()) {
      const SceneScores& s = *r.scene;
      csv << detail::fmt6(s.objects.precision) << ','
          << detail::fmt6(s.objects.recall) << ','
          << detail::fmt6(s.objects.f1) << ','
          << detail::fmt6(s.init.precision) << ','
          << detail::fmt6(s.init.recall) << ','
          << detail::fmt6(s.init.f1) << ','
          << detail::fmt6(s.goal.precision) << ','
          << detail::fmt6(s.goal.recall) << ','
          << detail::fmt6(s.goal.f1) << ',';
    } else {
      csv << ",,,,,,,,,";
    }
    csv << r.tokens.prompt_tokens << ',' << r.tokens.response_tokens << ','
        << r.tokens.calls << ',';
    if (r.plan_length.has_value()) csv << *r.plan_length;
    csv << ',';
    std::string err = r.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ' ';
    }
    csv << err << '\n';
  }
}

inline void write_transcripts(const Report& report,
                              const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "transcripts");
  for (const auto& t : report.transcripts) {
    if (t.text.empty()) continue;
    std::ofstream out(out_dir / "transcripts" /
                      (t.task_id + "__" + t.pipeline + ".log"));
    out << t.text;
  }
}

}  // namespace formabench
