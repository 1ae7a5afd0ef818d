#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kscope/automaton.hpp"
#include "kscope/christol.hpp"
#include "kscope/dirichlet.hpp"
#include "kscope/kernel.hpp"
#include "kscope/seqgen.hpp"
#include "kscope/zeta.hpp"

namespace kscope::io {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form.
std::string format_double(double x);

// CSV writers emit a header row then one line per record, '\n' terminated.
std::string table_csv(const ValueTable& t);
Json table_json(const ValueTable& t);

Json profile_json(const KernelProfile& p);
Json profile_json(const RankProfile& p);
std::string profile_csv(const KernelProfile& p);
std::string profile_csv(const RankProfile& p);

Json representation_json(const LinearRepresentation& rep);
// Throws DomainError on malformed input.
LinearRepresentation representation_from_json(const Json& j);

Json lattice_json(const PoleLattice& lattice);
std::string lattice_csv(const std::vector<PolePoint>& points);

Json eval_json(const EvalResult& r);
Json identity_json(const IdentityReport& report);
Json pole_scan_json(const PoleScanReport& report);
std::string scan_csv(const std::vector<ScanRow>& rows);

std::string zeros_csv(const std::vector<ZeroRecord>& zeros);
std::string count_csv(const std::vector<TlogTRow>& rows);
Json zero_count_json(const ZeroCount& c);

// Coefficients as an integer array; index 0 is the constant term and is 0 for table series.
Json series_json(const FpSeries& s);
Json orbit_json(const OrbitReport& report);

}  // namespace kscope::io
