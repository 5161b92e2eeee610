// SPDX-License-Identifier: Apache-2.0
//
// Micro benchmarks over the three-counter program: front end, automaton
// expansion, the full pipeline to SMT-LIB text, and interpreter throughput.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "l2h/automaton.hpp"
#include "l2h/driver.hpp"
#include "l2h/interp.hpp"
#include "l2h/parser.hpp"

namespace {

std::string load(const std::string& name) {
    std::ifstream in(std::string(L2H_BENCH_CORPUS_DIR) + "/" + name);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::string& counters_text() {
    static const std::string text = load("counters3.lus");
    return text;
}

void BM_Parse(benchmark::State& state) {
    for (auto _ : state) {
        l2h::Diagnostics diags;
        auto program = l2h::parse_text(counters_text(), diags);
        benchmark::DoNotOptimize(program);
    }
}
BENCHMARK(BM_Parse);

void BM_ExpandAutomata(benchmark::State& state) {
    l2h::Diagnostics diags;
    auto program = l2h::parse_text(counters_text(), diags);
    auto info = l2h::check_program(*program, diags);
    for (auto _ : state) {
        l2h::Diagnostics inner;
        auto expanded = l2h::expand_all(*program, *info, inner);
        benchmark::DoNotOptimize(expanded);
    }
}
BENCHMARK(BM_ExpandAutomata);

void BM_CompileToHorn(benchmark::State& state) {
    l2h::CompilerConfig config;
    config.main_node = "top";
    for (auto _ : state) {
        l2h::Diagnostics diags;
        auto result = l2h::run_pipeline_on(counters_text(), config, diags);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_CompileToHorn);

void BM_InterpreterSteps(benchmark::State& state) {
    l2h::CompilerConfig config;
    config.main_node = "top";
    l2h::Diagnostics diags;
    auto result = l2h::run_pipeline_on(counters_text(), config, diags);
    auto interp = l2h::Interpreter::create(result->normalized, result->info, diags);
    l2h::InstanceState instance = interp->init_state("top");
    const std::map<std::string, l2h::Value> inputs{{"x", l2h::Value::boolean(false)}};
    for (auto _ : state) {
        auto outputs = interp->step("top", instance, inputs);
        benchmark::DoNotOptimize(outputs);
    }
}
BENCHMARK(BM_InterpreterSteps);

}  // namespace

BENCHMARK_MAIN();
