#include "cli_runner.hpp"

#include <doctest.h>
#include <json.hpp>

using nlohmann::json;
using tvar::test::run_cli;

TEST_CASE("dropping the decay closure fails the audit") {
  const auto r = run_cli({"audit", "--benchmark", "landing-gear", "--property", "EF(AG(msb))",
                          "--strategy", "decay", "--inject-fault", "drop-decay-closure"});
  CHECK(r.code == 1);
  const json j = json::parse(r.out);
  CHECK(j["passed"] == false);
  CHECK(j["fault"] == "drop-decay-closure");
  CHECK(j["audits"]["soundness"]["counts"].contains("7b"));
}

TEST_CASE("dropping half of each split fails the audit") {
  const auto r = run_cli({"audit", "--benchmark", "landing-gear", "--property", "EF(AG(msb))",
                          "--strategy", "input", "--inject-fault", "drop-split-half"});
  CHECK(r.code == 1);
  const json j = json::parse(r.out);
  CHECK(j["audits"]["soundness"]["counts"].contains("6c"));
}

TEST_CASE("fault flag accepts none and rejects unknown faults") {
  CHECK(run_cli({"audit", "--benchmark", "landing-gear", "--property", "EF(AG(msb))",
                 "--inject-fault", "none"})
            .code == 0);
  CHECK(run_cli({"audit", "--benchmark", "landing-gear", "--property", "EF(AG(msb))",
                 "--inject-fault", "flip-everything"})
            .code == 3);
  CHECK(run_cli({"verify", "--benchmark", "landing-gear", "--property", "EF(AG(msb))",
                 "--inject-fault", "none"})
            .code == 0);
}
