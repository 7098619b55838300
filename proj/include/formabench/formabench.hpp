#pragma once

#include "formabench/bench/dataset.hpp"
#include "formabench/bench/eval.hpp"
#include "formabench/bench/generator.hpp"
#include "formabench/errors.hpp"
#include "formabench/external_planner.hpp"
#include "formabench/grounding.hpp"
#include "formabench/metrics.hpp"
#include "formabench/model_client.hpp"
#include "formabench/oracle_client.hpp"
#include "formabench/pddl/ast.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/pddl/printer.hpp"
#include "formabench/pipelines.hpp"
#include "formabench/planner.hpp"
#include "formabench/prompts.hpp"
#include "formabench/scene_graph.hpp"
#include "formabench/validator.hpp"
