#include "w2i/config.hpp"

#include "w2i/error.hpp"

#include <fstream>
#include <set>

namespace w2i {

namespace {

class FieldReader {
public:
    explicit FieldReader(const Json& j) : j_(j) {}

    template <class T, class Check>
    void read(const char* key, T& out, Check&& valid, const char* expectation) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        if (!valid(*it)) {
            bad(key, expectation);
            return;
        }
        out = it->template get<T>();
    }

    void bad(const std::string& field, const std::string& why) {
        problems_ += (problems_.empty() ? "" : "; ") + field + ": " + why;
    }

    void check_unknown() {
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.count(key)) bad(key, "unknown field");
        }
    }

    const std::string& problems() const { return problems_; }

private:
    const Json& j_;
    std::set<std::string> seen_;
    std::string problems_;
};

bool is_int(const Json& v) { return v.is_number_integer(); }
bool is_num(const Json& v) { return v.is_number(); }
bool is_bool(const Json& v) { return v.is_boolean(); }

}  // namespace

RunConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    RunConfig c;
    FieldReader r(j);
    r.read("t_max", c.t_max, is_int, "expected an integer");
    r.read("threshold_tau", c.threshold_tau, is_num, "expected a number");
    r.read("allow_unnormalized_weights", c.allow_unnormalized_weights, is_bool, "expected a boolean");
    r.read("exemplar_cap", c.exemplar_cap, is_int, "expected an integer");
    r.read("search_result_count", c.search_result_count, is_int, "expected an integer");
    r.read("query_rewrite_attempts", c.query_rewrite_attempts, is_int, "expected an integer");
    r.read("json_parse_retries", c.json_parse_retries, is_int, "expected an integer");
    r.read("retrieval_enabled", c.retrieval_enabled, is_bool, "expected a boolean");
    r.read("seed", c.seed, [](const Json& v) { return v.is_number_unsigned(); },
           "expected a non-negative integer");

    std::string profile;
    r.read("backend_profile", profile, [](const Json& v) { return v.is_string(); },
           "expected \"live\" or \"mock\"");
    if (profile == "live") {
        c.backend_profile = BackendProfile::live;
    } else if (profile == "mock") {
        c.backend_profile = BackendProfile::mock;
    } else if (!profile.empty()) {
        r.bad("backend_profile", "expected \"live\" or \"mock\"");
    }

    Json weights = Json::object();
    r.read("weights", weights, [](const Json& v) { return v.is_object(); }, "expected an object");
    FieldReader w(weights);
    w.read("alpha", c.weights.alpha, is_num, "expected a number");
    w.read("beta", c.weights.beta, is_num, "expected a number");
    w.read("gamma", c.weights.gamma, is_num, "expected a number");
    w.check_unknown();
    if (!w.problems().empty()) r.bad("weights", "{" + w.problems() + "}");

    r.check_unknown();
    if (!r.problems().empty()) throw ConfigError(r.problems());
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

Json to_json(const RunConfig& c) {
    return Json{{"t_max", c.t_max},
                {"threshold_tau", c.threshold_tau},
                {"weights", Json{{"alpha", c.weights.alpha}, {"beta", c.weights.beta}, {"gamma", c.weights.gamma}}},
                {"allow_unnormalized_weights", c.allow_unnormalized_weights},
                {"exemplar_cap", c.exemplar_cap},
                {"search_result_count", c.search_result_count},
                {"query_rewrite_attempts", c.query_rewrite_attempts},
                {"json_parse_retries", c.json_parse_retries},
                {"seed", c.seed},
                {"backend_profile", to_string(c.backend_profile)},
                {"retrieval_enabled", c.retrieval_enabled}};
}

RunConfig resolve_config(RunConfig base, const ConfigOverrides& o) {
    if (o.t_max) base.t_max = *o.t_max;
    if (o.threshold_tau) base.threshold_tau = *o.threshold_tau;
    if (o.seed) base.seed = *o.seed;
    if (o.backend_profile) base.backend_profile = *o.backend_profile;
    base.validate();
    return base;
}

}  // namespace w2i
