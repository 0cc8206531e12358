#include "commands.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "greybox/checklist.hpp"
#include "greybox/contopt/bench.hpp"
#include "greybox/errors.hpp"
#include "greybox/experiment.hpp"
#include "greybox/json_util.hpp"
#include "greybox/qrak.hpp"
#include "greybox/recommender.hpp"
#include "greybox/spec_io.hpp"
#include "http_server.hpp"
#include "session_service.hpp"

namespace greybox::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::Io: return kIo;
    case ErrorKind::Parse:
    case ErrorKind::RuleSyntax: return kParse;
    case ErrorKind::Version: return kVersion;
    case ErrorKind::IncompleteSession: return kIncomplete;
    case ErrorKind::SpecInvalid: return kSpecInvalid;
    case ErrorKind::Unfinalized: return kUnfinalized;
    case ErrorKind::EmptyObjectives:
    case ErrorKind::InconsistentFlags:
    case ErrorKind::Unclassifiable:
    case ErrorKind::EmptyParticipants:
    case ErrorKind::UnknownInstance:
    case ErrorKind::AnswerTypeMismatch:
    case ErrorKind::QrakInconsistent:
    case ErrorKind::RequiredItem:
    case ErrorKind::EmptyReason:
    case ErrorKind::InvalidStageTransition: return kEngine;
    case ErrorKind::DimensionZero:
    case ErrorKind::BudgetZero:
    case ErrorKind::InvalidDomain:
    case ErrorKind::InvalidConfig: return kContopt;
    case ErrorKind::DuplicateName:
    case ErrorKind::ResponseWithLevels:
    case ErrorKind::NoiseConditioning:
    case ErrorKind::MissingControllable:
    case ErrorKind::MissingResponse:
    case ErrorKind::IncompleteRuns:
    case ErrorKind::UnknownResponse: return kExperiment;
  }
  return kInternal;
}

struct Context {
  std::string data_dir;

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative() && !data_dir.empty()) return fs::path(data_dir) / path;
    return path;
  }
};

void emit(const std::string& text, const std::string& out_path, const Context& ctx) {
  if (out_path.empty())
    std::cout << text << std::flush;
  else
    service::write_file(ctx.resolve(out_path), text);
}

std::shared_ptr<const checklist::ChecklistTemplate> load_template(const std::string& path, const Context& ctx) {
  if (path.empty()) return checklist::default_template_ptr();
  return std::make_shared<const checklist::ChecklistTemplate>(
      checklist::parse_template(service::read_file(ctx.resolve(path))));
}

std::vector<model::PersonRole> parse_participants(const std::string& text) {
  std::vector<model::PersonRole> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      auto colon = item.find(':');
      if (colon == std::string::npos || colon == 0)
        throw Error(ErrorKind::InvalidArgument, "participants are given as name:role, got '" + item + "'");
      out.push_back({item.substr(0, colon), item.substr(colon + 1)});
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string session_id_for(const fs::path& file) {
  auto stem = file.stem().string();
  if (!model::is_identifier(stem))
    throw Error(ErrorKind::InvalidArgument,
                "cannot derive a session id from '" + file.filename().string() + "'; pass --id");
  return stem;
}

fs::path default_spec_path(const fs::path& session_file) {
  auto p = session_file;
  p.replace_extension(".spec.json");
  return p;
}

std::string view_markdown(const checklist::ChecklistSession& s) {
  const auto p = checklist::progress(s);
  std::string out = "Session " + s.id + " (revision " + std::to_string(s.revision) + ", stage " +
                    std::string(checklist::to_string(s.stage)) + ")\n";
  out += "answered " + std::to_string(p.answered) + ", skipped " + std::to_string(p.skipped) + ", pending " +
         std::to_string(p.pending) + "\n";
  if (auto next = s.stage == checklist::Stage::Planning ? checklist::next_item(s) : std::nullopt)
    out += "\nNext: " + next->id + " [" + std::string(checklist::to_string(next->answer_kind)) + "]\n" +
           next->prompt + "\n";
  else
    out += "\nNo pending items.\n";
  return out;
}

// --- subcommand option holders -------------------------------------------------

struct IntakeOpts {
  std::string file, participants, out, id, from, item, value, value_file, reason, jump, stage, tpl;
  std::string format = "json";
};

struct FileOpts {
  std::string file, format, out, rules;
  unsigned threads = 0;
  std::string design_out, runs_out;
};

struct ReportOpts {
  std::string design, runs, meta, out;
  std::vector<std::string> selects;
  bool guide_sheet = false;
};

struct QrakOpts {
  std::string known = "yes", a_priori = "unknown", relaxable = "unknown", quantifiable = "unknown";
  bool list = false;
  std::string format = "json";
};

struct ServeOpts {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

Ternary ternary_arg(const std::string& name, const std::string& v) {
  auto t = ternary_from_string(v);
  if (!t) throw Error(ErrorKind::InvalidArgument, name + " must be yes, no or unknown");
  return *t;
}

// --- commands -------------------------------------------------------------------

using checklist::ChecklistSession;

ChecklistSession load(const IntakeOpts& o, const Context& ctx) {
  return checklist::load_session(service::read_file(ctx.resolve(o.file)), load_template(o.tpl, ctx));
}

void store(const ChecklistSession& s, const IntakeOpts& o, const Context& ctx) {
  service::write_file(ctx.resolve(o.file), checklist::save_session(s));
}

int intake_new(const IntakeOpts& o, const Context& ctx) {
  const auto path = ctx.resolve(o.out);
  const auto id = o.id.empty() ? session_id_for(path) : o.id;
  const auto tpl = load_template(o.tpl, ctx);
  const auto people = parse_participants(o.participants);
  ChecklistSession s;
  if (!o.from.empty()) {
    const auto spec = model::parse_spec(service::read_file(ctx.resolve(o.from)));
    s = checklist::reopen_session(tpl, spec, people, id, service::current_time());
  } else {
    s = checklist::new_session(tpl, people, id, service::current_time());
  }
  service::write_file(path, checklist::save_session(s));
  std::cout << (o.format == "md" ? view_markdown(s) : json_util::canonical_dump(service::session_view(s)));
  return kOk;
}

int intake_show(const IntakeOpts& o, const Context& ctx, bool only_next) {
  const auto s = load(o, ctx);
  if (!only_next) {
    std::cout << (o.format == "md" ? view_markdown(s) : json_util::canonical_dump(service::session_view(s)));
    return kOk;
  }
  std::optional<std::string_view> jump;
  if (!o.jump.empty()) jump = o.jump;
  const auto next = s.stage == checklist::Stage::Planning ? checklist::next_item(s, jump) : std::nullopt;
  if (o.format == "md") {
    std::cout << (next ? next->id + "\n" + next->prompt + "\n" : std::string("done\n"));
  } else {
    std::cout << json_util::canonical_dump({{"next", next ? checklist::instance_to_json(*next) : json(nullptr)}});
  }
  return kOk;
}

int intake_answer(const IntakeOpts& o, const Context& ctx) {
  if (o.value.empty() == o.value_file.empty())
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --value or --file");
  const json value = json_util::parse_document(o.value.empty() ? service::read_file(ctx.resolve(o.value_file))
                                                               : o.value);
  const auto s = checklist::answer(load(o, ctx), o.item, value, service::current_time());
  store(s, o, ctx);
  std::cout << (o.format == "md" ? view_markdown(s) : json_util::canonical_dump(service::session_view(s)));
  return kOk;
}

int intake_skip(const IntakeOpts& o, const Context& ctx) {
  const auto s = checklist::skip(load(o, ctx), o.item, o.reason, service::current_time());
  store(s, o, ctx);
  std::cout << (o.format == "md" ? view_markdown(s) : json_util::canonical_dump(service::session_view(s)));
  return kOk;
}

int intake_finalize(const IntakeOpts& o, const Context& ctx) {
  const auto done = checklist::finalize(load(o, ctx), service::current_time());
  const auto spec_path = o.out.empty() ? default_spec_path(ctx.resolve(o.file)) : ctx.resolve(o.out);
  service::write_file(spec_path, model::write_spec(done.spec));
  store(done.session, o, ctx);
  std::cerr << "spec written to " << spec_path.string() << "\n";
  return kOk;
}

int intake_export(const IntakeOpts& o, const Context& ctx) {
  const auto s = load(o, ctx);
  if (s.stage == checklist::Stage::Planning)
    throw Error(ErrorKind::Unfinalized, "session '" + s.id + "' is still in planning; run intake finalize");
  emit(model::write_spec(s.draft), o.out, ctx);
  return kOk;
}

int intake_stage(const IntakeOpts& o, const Context& ctx) {
  auto stage = checklist::stage_from_string(o.stage);
  if (!stage) throw Error(ErrorKind::InvalidArgument, "unknown stage '" + o.stage + "'");
  const auto s = checklist::set_stage(load(o, ctx), *stage, service::current_time());
  store(s, o, ctx);
  std::cout << (o.format == "md" ? view_markdown(s) : json_util::canonical_dump(service::session_view(s)));
  return kOk;
}

int cmd_validate(const FileOpts& o, const Context& ctx) {
  const auto spec = model::parse_spec(service::read_file(ctx.resolve(o.file)));
  const auto findings = model::validate_spec(spec);
  if (o.format == "md") {
    std::string out = "| severity | code | subject | message |\n|---|---|---|---|\n";
    for (const auto& f : findings)
      out += "| " + std::string(model::to_string(f.severity)) + " | " + f.code + " | " + f.subject + " | " +
             f.message + " |\n";
    emit(out, o.out, ctx);
  } else {
    emit(json_util::canonical_dump({{"findings", model::findings_to_json(findings)},
                                    {"valid", !model::has_errors(findings)}}),
         o.out, ctx);
  }
  return model::has_errors(findings) ? kFindings : kOk;
}

int cmd_recommend(const FileOpts& o, const Context& ctx) {
  const auto spec = model::parse_spec(service::read_file(ctx.resolve(o.file)));
  std::optional<recommend::RuleTable> custom;
  if (!o.rules.empty()) custom = recommend::parse_rule_table(service::read_file(ctx.resolve(o.rules)));
  const auto recs = recommend::recommend(spec, custom ? *custom : recommend::default_rule_table());
  emit(o.format == "md" ? recommend::render_markdown(recs) : json_util::canonical_dump(recommend::to_json(recs)),
       o.out, ctx);
  return kOk;
}

int cmd_bench(const FileOpts& o, const Context& ctx) {
  auto cfg = contopt::parse_bench_config(service::read_file(ctx.resolve(o.file)));
  if (o.threads > 0) cfg.threads = o.threads;
  const auto table = contopt::benchmark_init_rules(cfg);
  std::string text;
  if (o.format == "md") {
    text = contopt::bench_to_markdown(table, cfg);
  } else if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : table.rows)
      rows.push_back({{"function", r.function},
                      {"start", r.start},
                      {"rule", r.rule},
                      {"replicate", r.replicate},
                      {"init_diameter", r.init.diameter},
                      {"edge_ratio", std::isfinite(r.init.edge_ratio) ? json(r.init.edge_ratio) : json(nullptr)},
                      {"volume", r.init.volume},
                      {"degenerate", r.init.degenerate},
                      {"evals_to_target", r.evals_to_target ? json(*r.evals_to_target) : json(nullptr)},
                      {"evals_used", r.evals_used},
                      {"best_f", r.best_f},
                      {"termination", contopt::to_string(r.termination)}});
    text = json_util::canonical_dump({{"rows", rows}});
  } else {
    text = contopt::bench_to_csv(table);
  }
  emit(text, o.out, ctx);
  if (!o.design_out.empty() || !o.runs_out.empty()) {
    const auto [design, runs] = contopt::bench_experiment(table, cfg);
    if (!o.design_out.empty()) service::write_file(ctx.resolve(o.design_out), experiment::write_design_csv(design));
    if (!o.runs_out.empty())
      service::write_file(ctx.resolve(o.runs_out), experiment::write_runs_csv(design, runs));
  }
  return kOk;
}

int cmd_report(const ReportOpts& o, const Context& ctx) {
  using namespace experiment;
  const Design design = parse_design_csv(service::read_file(ctx.resolve(o.design)));
  std::vector<RunRecord> runs;
  if (!o.runs.empty()) runs = parse_runs_csv(design, service::read_file(ctx.resolve(o.runs)));

  ReportMetadata meta;
  if (!o.meta.empty()) {
    const auto doc = json_util::parse_document(service::read_file(ctx.resolve(o.meta)));
    json_util::ObjectReader r(doc, "");
    if (r.has("title")) meta.title = r.string("title");
    if (const json* sections = r.optional("sections")) {
      for (const auto& [key, body] : sections->items()) {
        auto s = section_from_string(key);
        if (!s) json_util::fail("sections." + key, "unknown section");
        meta.bodies.emplace_back(*s, json_util::as_string(body, "sections." + key));
      }
    }
    r.finish();
  }

  std::vector<Selection> selections;
  if (!runs.empty()) {
    std::vector<std::string> specs = o.selects;
    if (specs.empty())
      for (const auto* f : design.of(Category::Response)) specs.push_back(f->name + ":mean:minimize");
    for (const auto& spec : specs) {
      auto a = spec.find(':');
      auto b = a == std::string::npos ? a : spec.find(':', a + 1);
      if (b == std::string::npos)
        throw Error(ErrorKind::InvalidArgument, "--select takes response:aggregation:direction, got '" + spec + "'");
      auto agg = aggregation_from_string(spec.substr(a + 1, b - a - 1));
      auto dir = direction_from_string(spec.substr(b + 1));
      if (!agg || !dir)
        throw Error(ErrorKind::InvalidArgument,
                    "aggregation is mean or worst_case, direction minimize or maximize: '" + spec + "'");
      selections.push_back(robust_select(design, runs, spec.substr(0, a), *agg, *dir));
    }
  }
  const auto skeleton = o.guide_sheet ? guide_sheet_skeleton(meta) : report_skeleton(meta);
  emit(render_report(skeleton, &design, selections), o.out, ctx);
  return kOk;
}

int cmd_qrak(const QrakOpts& o) {
  std::vector<qrak::QrakCode> codes;
  if (o.list) {
    codes = qrak::enumerate_known_classes();
    codes.push_back(qrak::QrakCode::hidden());
  } else {
    auto known = ternary_arg("--known", o.known);
    if (known == Ternary::Unknown) throw Error(ErrorKind::InvalidArgument, "--known must be yes or no");
    codes.push_back(qrak::classify(known == Ternary::Yes, ternary_arg("--a-priori", o.a_priori),
                                   ternary_arg("--relaxable", o.relaxable),
                                   ternary_arg("--quantifiable", o.quantifiable)));
  }
  json out = json::array();
  std::string md = "| code | category | hint |\n|---|---|---|\n";
  for (const auto& c : codes) {
    const auto hint = qrak::treatment_hint(c);
    out.push_back({{"code", c.rendered()}, {"category", qrak::to_string(hint.category)}, {"hint", hint.text}});
    md += "| " + c.rendered() + " | " + std::string(qrak::to_string(hint.category)) + " | " + hint.text + " |\n";
  }
  std::cout << (o.format == "md" ? md : json_util::canonical_dump(o.list ? out : out.front()));
  return kOk;
}

service::HttpServer* g_server = nullptr;

int cmd_serve(const ServeOpts& o, const Context& ctx) {
  service::SessionService svc({ctx.data_dir.empty() ? fs::path(".") : fs::path(ctx.data_dir),
                               service::current_time, nullptr});
  std::optional<fs::path> static_dir;
  if (!o.static_dir.empty()) static_dir = o.static_dir;
  service::HttpServer server(svc, static_dir);
  const int port = server.bind(o.host, o.port);
  if (port < 0) throw Error(ErrorKind::Io, "cannot bind " + o.host + ":" + std::to_string(o.port));
  std::cerr << "serving on http://" << o.host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"greybox: problem definition checklist, algorithm recommendations and simplex benchmarks"};
  app.require_subcommand(1);
  Context ctx;
  if (const char* dir = std::getenv("GREYBOX_DATA_DIR")) ctx.data_dir = dir;
  app.add_option("--data-dir", ctx.data_dir, "Directory for relative paths (default: $GREYBOX_DATA_DIR)");

  std::function<int()> action;
  const std::vector<std::string> formats_json_md{"json", "md"};

  // intake
  IntakeOpts io;
  auto* intake = app.add_subcommand("intake", "Drive a checklist session file");
  intake->require_subcommand(1);
  intake->add_option("--template", io.tpl, "Adapted checklist template");
  intake->add_option("--format", io.format, "Output format")->check(CLI::IsMember(formats_json_md));

  auto* i_new = intake->add_subcommand("new", "Start a session");
  i_new->add_option("--participants", io.participants, "name:role,name:role")->required();
  i_new->add_option("--out", io.out, "Session file to create")->required();
  i_new->add_option("--id", io.id, "Session id (default: file name stem)");
  i_new->add_option("--from", io.from, "Reopen from a previous spec (new cycle iteration)");
  i_new->callback([&] { action = [&] { return intake_new(io, ctx); }; });

  for (auto [name, desc, only_next] : {std::tuple{"resume", "Show progress and the next item", false},
                                       std::tuple{"next", "Show the next pending item", true}}) {
    auto* sub = intake->add_subcommand(name, desc);
    sub->add_option("session", io.file, "Session file")->required();
    if (only_next) sub->add_option("--jump", io.jump, "Pending instance to jump to");
    sub->callback([&, only_next = only_next] { action = [&, only_next] { return intake_show(io, ctx, only_next); }; });
  }

  auto* i_answer = intake->add_subcommand("answer", "Answer an item instance");
  i_answer->add_option("session", io.file, "Session file")->required();
  i_answer->add_option("--item", io.item, "Instance id, e.g. item2 or item4:f:shape")->required();
  i_answer->add_option("--value", io.value, "Answer as JSON");
  i_answer->add_option("--file", io.value_file, "File holding the answer JSON");
  i_answer->callback([&] { action = [&] { return intake_answer(io, ctx); }; });

  auto* i_skip = intake->add_subcommand("skip", "Skip an item instance with a reason");
  i_skip->add_option("session", io.file, "Session file")->required();
  i_skip->add_option("--item", io.item, "Instance id")->required();
  i_skip->add_option("--reason", io.reason, "Why it cannot be answered now")->required();
  i_skip->callback([&] { action = [&] { return intake_skip(io, ctx); }; });

  auto* i_fin = intake->add_subcommand("finalize", "Finalize into a spec");
  i_fin->add_option("session", io.file, "Session file")->required();
  i_fin->add_option("--out", io.out, "Spec file (default: <session>.spec.json)");
  i_fin->callback([&] { action = [&] { return intake_finalize(io, ctx); }; });

  auto* i_exp = intake->add_subcommand("export", "Write the spec of a finalized session");
  i_exp->add_option("session", io.file, "Session file")->required();
  i_exp->add_option("--out", io.out, "Spec file (default: stdout)");
  i_exp->callback([&] { action = [&] { return intake_export(io, ctx); }; });

  auto* i_stage = intake->add_subcommand("stage", "Move the session to another cycle stage");
  i_stage->add_option("session", io.file, "Session file")->required();
  i_stage->add_option("--to", io.stage, "planning, design, implementation, experimentation, application")
      ->required();
  i_stage->callback([&] { action = [&] { return intake_stage(io, ctx); }; });
  for (auto* sub : intake->get_subcommands({})) sub->fallthrough();

  // validate / recommend / bench
  FileOpts fo;
  auto* validate = app.add_subcommand("validate", "Lint a spec file");
  validate->add_option("spec", fo.file, "Spec file")->required();
  validate->add_option("--format", fo.format, "json or md")->check(CLI::IsMember(formats_json_md));
  validate->add_option("--out", fo.out, "Output file");
  validate->callback([&] { action = [&] { return cmd_validate(fo, ctx); }; });

  auto* rec = app.add_subcommand("recommend", "Recommend algorithm families for a spec");
  rec->add_option("spec", fo.file, "Spec file")->required();
  rec->add_option("--format", fo.format, "json or md")->check(CLI::IsMember(formats_json_md));
  rec->add_option("--rules", fo.rules, "Alternative rule table");
  rec->add_option("--out", fo.out, "Output file");
  rec->callback([&] { action = [&] { return cmd_recommend(fo, ctx); }; });

  auto* bench = app.add_subcommand("bench", "Benchmark simplex initialization rules");
  bench->add_option("config", fo.file, "Benchmark configuration (JSON)")->required();
  bench->add_option("--format", fo.format, "csv, md or json")
      ->check(CLI::IsMember(std::vector<std::string>{"csv", "md", "json"}));
  bench->add_option("--out", fo.out, "Output file");
  bench->add_option("--threads", fo.threads, "Worker threads (results do not depend on it)");
  bench->add_option("--design-out", fo.design_out, "Also write the run set as an experiment design CSV");
  bench->add_option("--runs-out", fo.runs_out, "Also write the run records CSV");
  bench->callback([&] { action = [&] { return cmd_bench(fo, ctx); }; });

  // report
  ReportOpts ro;
  auto* report = app.add_subcommand("report", "Render a structured experiment report");
  report->add_option("--design", ro.design, "Design CSV")->required();
  report->add_option("--runs", ro.runs, "Run records CSV");
  report->add_option("--select", ro.selects, "response:mean|worst_case:minimize|maximize (repeatable)");
  report->add_option("--meta", ro.meta, "JSON with title and section texts");
  report->add_flag("--guide-sheet", ro.guide_sheet, "Pre-fill planning prompts");
  report->add_option("--out", ro.out, "Output file");
  report->callback([&] { action = [&] { return cmd_report(ro, ctx); }; });

  // qrak
  QrakOpts qo;
  auto* qr = app.add_subcommand("qrak", "Classify a constraint and print the treatment hint");
  qr->add_option("--known", qo.known, "yes or no");
  qr->add_option("--a-priori", qo.a_priori, "yes, no or unknown");
  qr->add_option("--relaxable", qo.relaxable, "yes, no or unknown");
  qr->add_option("--quantifiable", qo.quantifiable, "yes, no or unknown");
  qr->add_flag("--list", qo.list, "List all classes");
  qr->add_option("--format", qo.format, "json or md")->check(CLI::IsMember(formats_json_md));
  qr->callback([&] { action = [&] { return cmd_qrak(qo); }; });

  // template
  std::string template_out;
  auto* tpl = app.add_subcommand("template", "Print the default checklist template");
  tpl->add_option("--out", template_out, "Output file");
  tpl->callback([&] {
    action = [&] {
      emit(checklist::write_template(checklist::default_template()), template_out, ctx);
      return static_cast<int>(kOk);
    };
  });

  // serve
  ServeOpts so;
  auto* serve = app.add_subcommand("serve", "Serve the session HTTP API");
  serve->add_option("--host", so.host, "Bind address");
  serve->add_option("--port", so.port, "Port (0 picks a free one)");
  serve->add_option("--static-dir", so.static_dir, "Directory served at / (intake UI)");
  serve->callback([&] { action = [&] { return cmd_serve(so, ctx); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    if (!e.details().is_null()) std::cerr << json_util::canonical_dump(e.details());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace greybox::cli
