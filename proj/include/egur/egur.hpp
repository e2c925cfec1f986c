#pragma once

// Umbrella header: the whole library in one include.

#include "egur/ast.hpp"
#include "egur/backend.hpp"
#include "egur/code_runner.hpp"
#include "egur/common.hpp"
#include "egur/config.hpp"
#include "egur/consolidator.hpp"
#include "egur/context.hpp"
#include "egur/continual.hpp"
#include "egur/episode.hpp"
#include "egur/eval.hpp"
#include "egur/experience.hpp"
#include "egur/guide.hpp"
#include "egur/http_backend.hpp"
#include "egur/interp.hpp"
#include "egur/ledger.hpp"
#include "egur/lexer.hpp"
#include "egur/metrics.hpp"
#include "egur/parser.hpp"
#include "egur/printer.hpp"
#include "egur/processes.hpp"
#include "egur/prompts.hpp"
#include "egur/registry.hpp"
#include "egur/sat.hpp"
#include "egur/state.hpp"
#include "egur/strategies.hpp"
#include "egur/tasks.hpp"
#include "egur/text_ops.hpp"
#include "egur/trace.hpp"
#include "egur/validate.hpp"
#include "egur/value.hpp"
#include "egur/verify.hpp"
