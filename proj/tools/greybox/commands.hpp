#pragma once

// Exit codes of the greybox command line tool.
//
//    0  success
//    1  internal error
//    2  usage error (bad flags or arguments)
//    3  parse error (malformed JSON/CSV, rule syntax)
//    4  unsupported schema or template version
//    5  validate: the spec has Error findings
//    6  checklist incomplete (pending or required items)
//    7  finalized spec fails validation
//    8  checklist or classification engine rejected the request
//    9  spec or session not finalized
//   10  file system error
//   11  experiment design or analysis error
//   12  continuous optimization configuration error

namespace greybox::cli {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kParse = 3,
  kVersion = 4,
  kFindings = 5,
  kIncomplete = 6,
  kSpecInvalid = 7,
  kEngine = 8,
  kUnfinalized = 9,
  kIo = 10,
  kExperiment = 11,
  kContopt = 12,
};

int run(int argc, char** argv);

}  // namespace greybox::cli
