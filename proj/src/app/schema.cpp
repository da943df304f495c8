#include "horizonlab/app/schema.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "scenario_schema_text.hpp"

namespace horizonlab::app {

using nlohmann::json;

const json& scenario_schema() {
    static const json schema = json::parse(kScenarioSchemaText);
    return schema;
}

std::string scenario_schema_text() { return scenario_schema().dump(2) + "\n"; }

namespace {

const std::set<std::string> kAnnotations = {"$schema", "$id", "$defs", "title", "description", "default", "examples"};
const std::set<std::string> kAssertions = {
    "type",     "enum",     "const",   "required",         "properties",       "additionalProperties",
    "items",    "minItems", "maxItems", "uniqueItems",     "minLength",        "minimum",
    "maximum",  "exclusiveMinimum",    "exclusiveMaximum", "$ref",             "allOf",
    "if",       "then",     "not"};

std::string short_dump(const json& v) {
    std::string s = v.dump();
    return s.size() > 60 ? s.substr(0, 57) + "..." : s;
}

std::string escape_pointer(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

bool is_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "number") return v.is_number();
    if (t == "integer") {
        if (v.is_number_integer()) return true;
        if (v.is_number_float()) {
            const double d = v.get<double>();
            return std::isfinite(d) && std::floor(d) == d;
        }
        return false;
    }
    throw std::logic_error("schema uses unknown type '" + t + "'");
}

/// Numeric equality for enum/const and uniqueItems: 1 and 1.0 are equal.
bool json_equal(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
    if (a.type() != b.type()) return false;
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!json_equal(a[i], b[i])) return false;
        return true;
    }
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            auto jt = b.find(it.key());
            if (jt == b.end() || !json_equal(*it, *jt)) return false;
        }
        return true;
    }
    return a == b;
}

class Validator {
public:
    explicit Validator(const json& root) : root_(root) {}

    void run(const json& v, const json& s, const std::string& path, std::vector<SchemaError>& out) const {
        if (s.is_boolean()) {
            if (!s.get<bool>()) out.push_back({path, "no value is allowed here"});
            return;
        }
        if (!s.is_object()) throw std::logic_error("schema node is neither object nor boolean");
        for (auto it = s.begin(); it != s.end(); ++it)
            if (!kAnnotations.count(it.key()) && !kAssertions.count(it.key()))
                throw std::logic_error("schema keyword '" + it.key() + "' is not supported");

        if (auto r = s.find("$ref"); r != s.end()) run(v, resolve(r->get<std::string>()), path, out);

        if (auto t = s.find("type"); t != s.end()) {
            bool ok = false;
            std::string names;
            if (t->is_string()) {
                ok = is_type(v, t->get<std::string>());
                names = t->get<std::string>();
            } else {
                for (const auto& tn : *t) {
                    ok = ok || is_type(v, tn.get<std::string>());
                    names += (names.empty() ? "" : " or ") + tn.get<std::string>();
                }
            }
            if (!ok) {
                out.push_back({path, "expected " + names + ", got " + short_dump(v)});
                return;  // the remaining keywords would only repeat the type error
            }
        }
        if (auto e = s.find("enum"); e != s.end()) {
            bool ok = false;
            for (const auto& c : *e) ok = ok || json_equal(v, c);
            if (!ok) out.push_back({path, "value " + short_dump(v) + " is not one of " + e->dump()});
        }
        if (auto c = s.find("const"); c != s.end())
            if (!json_equal(v, *c)) out.push_back({path, "value must be " + c->dump()});

        if (v.is_number()) numeric(v, s, path, out);
        if (v.is_string()) {
            if (auto m = s.find("minLength"); m != s.end() && v.get<std::string>().size() < m->get<std::size_t>())
                out.push_back({path, "string shorter than " + m->dump() + " characters"});
        }
        if (v.is_array()) array(v, s, path, out);
        if (v.is_object()) object(v, s, path, out);

        if (auto a = s.find("allOf"); a != s.end())
            for (const auto& sub : *a) run(v, sub, path, out);
        if (auto i = s.find("if"); i != s.end()) {
            std::vector<SchemaError> probe;
            run(v, *i, path, probe);
            if (probe.empty())
                if (auto th = s.find("then"); th != s.end()) run(v, *th, path, out);
        }
        if (auto n = s.find("not"); n != s.end()) {
            std::vector<SchemaError> probe;
            run(v, *n, path, probe);
            if (probe.empty()) {
                std::string what = "value matches a forbidden form";
                if (n->is_object() && n->contains("required") && n->size() == 1 && (*n)["required"].size() == 1)
                    what = "property \"" + (*n)["required"][0].get<std::string>() + "\" is not allowed here";
                out.push_back({path, what});
            }
        }
    }

private:
    const json& resolve(const std::string& ref) const {
        if (ref.rfind("#", 0) != 0) throw std::logic_error("only local $ref is supported: " + ref);
        return root_.at(json::json_pointer(ref.substr(1)));
    }

    static void numeric(const json& v, const json& s, const std::string& path, std::vector<SchemaError>& out) {
        const double d = v.get<double>();
        auto bound = [&](const char* key, auto fails, const char* rel) {
            if (auto b = s.find(key); b != s.end() && fails(d, b->get<double>()))
                out.push_back({path, "value " + v.dump() + " must be " + rel + " " + b->dump()});
        };
        bound("minimum", [](double x, double b) { return !(x >= b); }, ">=");
        bound("maximum", [](double x, double b) { return !(x <= b); }, "<=");
        bound("exclusiveMinimum", [](double x, double b) { return !(x > b); }, ">");
        bound("exclusiveMaximum", [](double x, double b) { return !(x < b); }, "<");
    }

    void array(const json& v, const json& s, const std::string& path, std::vector<SchemaError>& out) const {
        if (auto m = s.find("minItems"); m != s.end() && v.size() < m->get<std::size_t>())
            out.push_back({path, "array needs at least " + m->dump() + " items, has " + std::to_string(v.size())});
        if (auto m = s.find("maxItems"); m != s.end() && v.size() > m->get<std::size_t>())
            out.push_back({path, "array allows at most " + m->dump() + " items, has " + std::to_string(v.size())});
        if (auto u = s.find("uniqueItems"); u != s.end() && u->get<bool>()) {
            for (std::size_t i = 0; i < v.size(); ++i)
                for (std::size_t j = i + 1; j < v.size(); ++j)
                    if (json_equal(v[i], v[j]))
                        out.push_back({path + "/" + std::to_string(j),
                                       "duplicates item " + std::to_string(i) + " " + short_dump(v[i])});
        }
        if (auto it = s.find("items"); it != s.end())
            for (std::size_t i = 0; i < v.size(); ++i) run(v[i], *it, path + "/" + std::to_string(i), out);
    }

    void object(const json& v, const json& s, const std::string& path, std::vector<SchemaError>& out) const {
        if (auto r = s.find("required"); r != s.end())
            for (const auto& key : *r)
                if (!v.contains(key.get<std::string>()))
                    out.push_back({path, "missing required property \"" + key.get<std::string>() + "\""});
        const auto props = s.find("properties");
        if (props != s.end())
            for (auto it = props->begin(); it != props->end(); ++it)
                if (auto f = v.find(it.key()); f != v.end()) run(*f, *it, path + "/" + escape_pointer(it.key()), out);
        if (auto ap = s.find("additionalProperties"); ap != s.end()) {
            if (!ap->is_boolean()) throw std::logic_error("additionalProperties must be boolean in this subset");
            if (!ap->get<bool>())
                for (auto it = v.begin(); it != v.end(); ++it)
                    if (props == s.end() || !props->contains(it.key()))
                        out.push_back({path + "/" + escape_pointer(it.key()), "unknown property \"" + it.key() + "\""});
        }
    }

    const json& root_;
};

}  // namespace

std::vector<SchemaError> validate_json(const json& instance, const json& schema) {
    std::vector<SchemaError> errors;
    Validator(schema).run(instance, schema, "", errors);
    return errors;
}

}  // namespace horizonlab::app
