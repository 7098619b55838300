#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "formabench/errors.hpp"
#include "formabench/metrics.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/planner.hpp"

namespace formabench {

// One benchmark task: images, an instruction, and a domain file, plus the
// ground-truth problem used for evaluation.
struct TaskInstance {
  std::string task_id;
  std::vector<std::string> images;  // file paths, manifest order
  std::string instruction;
  std::string domain_text;
  std::string gt_problem_text;
  AliasMap aliases;

  friend bool operator==(const TaskInstance& a, const TaskInstance& b) {
    return a.task_id == b.task_id && a.images == b.images &&
           a.instruction == b.instruction && a.domain_text == b.domain_text &&
           a.gt_problem_text == b.gt_problem_text && a.aliases == b.aliases;
  }
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestInvalid("cannot read file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace detail

// Layout: manifest.json at the root; one directory per task holding
// instruction.txt, domain.pddl, problem.pddl, optional aliases.json and
// images. Tasks are returned in manifest order. Strict mode additionally
// verifies that each gt problem compiles and is solvable.
inline std::vector<TaskInstance> load_dataset(
    const std::filesystem::path& dir, bool strict = false,
    std::vector<std::string>* warnings = nullptr) {
  namespace fs = std::filesystem;
  fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ManifestMissing("no manifest.json in " + dir.string());
  }
  nlohmann::json manifest;
  try {
    std::ifstream in(manifest_path);
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ManifestInvalid("manifest.json: " + std::string(e.what()));
  }
  if (!manifest.contains("tasks") || !manifest["tasks"].is_array()) {
    throw ManifestInvalid("manifest.json: missing 'tasks' array");
  }

  auto note = [&](const std::string& msg) {
    if (strict) throw ManifestInvalid(msg);
    if (warnings != nullptr) warnings->push_back(msg);
  };

  std::vector<TaskInstance> tasks;
  std::set<std::string> seen_ids;
  for (const auto& entry : manifest["tasks"]) {
    if (!entry.contains("task_id") || !entry.contains("path")) {
      throw ManifestInvalid(
          "manifest.json: task entry needs 'task_id' and 'path'");
    }
    TaskInstance task;
    task.task_id = entry["task_id"].get<std::string>();
    if (!seen_ids.insert(task.task_id).second) {
      throw ManifestInvalid("duplicate task_id '" + task.task_id + "'");
    }
    fs::path task_dir = dir / entry["path"].get<std::string>();
    task.instruction = detail::read_text_file(task_dir / "instruction.txt");
    task.domain_text = detail::read_text_file(task_dir / "domain.pddl");
    task.gt_problem_text = detail::read_text_file(task_dir / "problem.pddl");
    if (entry.contains("images")) {
      for (const auto& img : entry["images"]) {
        fs::path img_path = task_dir / img.get<std::string>();
        if (!fs::exists(img_path)) {
          throw ManifestInvalid("missing image file: " + img_path.string());
        }
        task.images.push_back(img_path.string());
      }
    }
    if (fs::exists(task_dir / "aliases.json")) {
      nlohmann::json aliases;
      try {
        std::ifstream in(task_dir / "aliases.json");
        in >> aliases;
        for (const auto& [k, v] : aliases.items()) {
          task.aliases[k] = v.get<std::string>();
        }
      } catch (const nlohmann::json::exception& e) {
        throw ManifestInvalid("aliases.json for '" + task.task_id + "': " +
                              std::string(e.what()));
      }
    }

    try {
      Domain domain = parse_domain(task.domain_text);
      Problem gt = parse_problem(task.gt_problem_text, domain);
      if (strict) {
        PlanResult result = solve(domain, gt);
        if (!result.found()) {
          throw GtUnsolvable("ground-truth problem of task '" + task.task_id +
                             "' is not solvable within default limits");
        }
      }
      (void)gt;
    } catch (const PddlError& e) {
      note("task '" + task.task_id + "': " + e.what());
    }

    tasks.push_back(std::move(task));
  }
  return tasks;
}

// Writes a dataset in the layout load_dataset expects.
inline void write_dataset(const std::filesystem::path& dir,
                          const std::string& name, const std::string& version,
                          const std::vector<TaskInstance>& tasks) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "tasks");
  nlohmann::ordered_json manifest;
  manifest["name"] = name;
  manifest["version"] = version;
  manifest["tasks"] = nlohmann::ordered_json::array();
  for (const auto& task : tasks) {
    fs::path task_dir = dir / "tasks" / task.task_id;
    fs::create_directories(task_dir);
    std::ofstream(task_dir / "instruction.txt") << task.instruction;
    std::ofstream(task_dir / "domain.pddl") << task.domain_text;
    std::ofstream(task_dir / "problem.pddl") << task.gt_problem_text;
    if (!task.aliases.empty()) {
      nlohmann::ordered_json aliases;
      for (const auto& [k, v] : task.aliases) aliases[k] = v;
      std::ofstream(task_dir / "aliases.json") << aliases.dump(2) << '\n';
    }
    nlohmann::ordered_json entry;
    entry["task_id"] = task.task_id;
    entry["path"] = "tasks/" + task.task_id;
    entry["images"] = nlohmann::ordered_json::array();
    for (const auto& img : task.images) {
      fs::path src(img);
      fs::path images_dir = task_dir / "images";
      fs::create_directories(images_dir);
      fs::path dst = images_dir / src.filename();
      if (fs::exists(src) && !fs::equivalent(src, dst)) {
        fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
      }
      entry["images"].push_back("images/" + src.filename().string());
    }
    manifest["tasks"].push_back(entry);
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

}  // namespace formabench
