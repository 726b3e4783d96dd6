#include "subfrac/fn_dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

namespace subfrac {

namespace {

struct Value {
    enum Kind { kNumber, kList, kFn } kind = kNumber;
    double number = 0.0;
    std::vector<double> list;
    TestFunctionPtr fn;
    std::size_t offset = 0;  // where the value started (for error messages)
};

struct Parser {
    const std::string& s;
    const GroupConfig& g;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }
    bool at(char c) const { return pos < s.size() && s[pos] == c; }
    void expect(char c) {
        if (!at(c))
            throw DslError(std::string("expected '") + c + "'", pos);
        ++pos;
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos;
        auto head = [](char c) {
            return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
        };
        auto body = [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        };
        if (pos >= s.size() || !head(s[pos]))
            throw DslError("expected identifier", pos);
        ++pos;
        while (pos < s.size() && body(s[pos])) ++pos;
        return s.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw DslError("expected number", pos);
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    Value value() {
        skip_ws();
        Value v;
        v.offset = pos;
        if (at('[')) {
            ++pos;
            v.kind = Value::kList;
            skip_ws();
            if (!at(']')) {
                v.list.push_back(number());
                skip_ws();
                while (at(',')) {
                    ++pos;
                    v.list.push_back(number());
                    skip_ws();
                }
            }
            expect(']');
            return v;
        }
        if (pos < s.size() &&
            (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
            v.kind = Value::kFn;
            v.fn = function();
            return v;
        }
        v.kind = Value::kNumber;
        v.number = number();
        return v;
    }

    TestFunctionPtr function() {
        skip_ws();
        const std::size_t name_off = pos;
        const std::string name = ident();
        skip_ws();
        expect('(');
        std::map<std::string, Value> kv;
        std::map<std::string, std::size_t> kv_off;
        skip_ws();
        if (!at(')')) {
            for (;;) {
                skip_ws();
                const std::size_t key_off = pos;
                const std::string key = ident();
                if (kv.count(key))
                    throw DslError("duplicate key '" + key + "'", key_off);
                skip_ws();
                expect('=');
                kv[key] = value();
                kv_off[key] = key_off;
                skip_ws();
                if (at(';')) {
                    ++pos;
                    continue;
                }
                break;
            }
        }
        expect(')');
        return build(name, name_off, kv, kv_off);
    }

    double want_number(std::map<std::string, Value>& kv, const std::string& fn,
                       const std::string& key, std::size_t fn_off) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw DslError(fn + ": missing key '" + key + "'", fn_off);
        if (it->second.kind != Value::kNumber)
            throw DslError(fn + ": key '" + key + "' must be a number",
                           it->second.offset);
        const double v = it->second.number;
        kv.erase(it);
        return v;
    }

    std::vector<double> want_list(std::map<std::string, Value>& kv,
                                  const std::string& fn, const std::string& key,
                                  std::size_t fn_off, std::size_t* off) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw DslError(fn + ": missing key '" + key + "'", fn_off);
        if (it->second.kind != Value::kList)
            throw DslError(fn + ": key '" + key + "' must be a list",
                           it->second.offset);
        if (off) *off = it->second.offset;
        std::vector<double> v = std::move(it->second.list);
        kv.erase(it);
        return v;
    }

    void no_extras(const std::map<std::string, Value>& kv,
                   const std::map<std::string, std::size_t>& kv_off,
                   const std::string& fn) {
        if (kv.empty()) return;
        const std::string& key = kv.begin()->first;
        throw DslError(fn + ": unknown key '" + key + "'", kv_off.at(key));
    }

    TestFunctionPtr build(const std::string& name, std::size_t name_off,
                          std::map<std::string, Value>& kv,
                          std::map<std::string, std::size_t>& kv_off) {
        if (name == "gaussian") {
            const double a = want_number(kv, name, "a", name_off);
            no_extras(kv, kv_off, name);
            return make_gaussian(a);
        }
        if (name == "poly_gauss") {
            std::size_t goff = 0;
            const std::vector<double> raw =
                want_list(kv, name, "gamma", name_off, &goff);
            const double a = want_number(kv, name, "a", name_off);
            no_extras(kv, kv_off, name);
            std::vector<int> gamma;
            gamma.reserve(raw.size());
            for (double e : raw) {
                if (std::rint(e) != e || e < 0.0)
                    throw DslError("poly_gauss: exponents must be nonnegative integers",
                                   goff);
                gamma.push_back(static_cast<int>(std::rint(e)));
            }
            if (gamma.size() != static_cast<std::size_t>(g.dim()))
                throw DslError("poly_gauss: gamma needs " +
                                   std::to_string(g.dim()) + " entries",
                               goff);
            return make_poly_gauss(std::move(gamma), a);
        }
        if (name == "koranyi_gauss") {
            no_extras(kv, kv_off, name);
            return make_koranyi_gauss();
        }
        if (name == "koranyi_gauss_x6") {
            no_extras(kv, kv_off, name);
            return make_koranyi_gauss_x6();
        }
        if (name == "left_translate") {
            std::size_t soff = 0;
            const std::vector<double> shift =
                want_list(kv, name, "shift", name_off, &soff);
            auto it = kv.find("base");
            if (it == kv.end())
                throw DslError("left_translate: missing key 'base'", name_off);
            if (it->second.kind != Value::kFn)
                throw DslError("left_translate: key 'base' must be a function",
                               it->second.offset);
            TestFunctionPtr base = it->second.fn;
            kv.erase(it);
            no_extras(kv, kv_off, name);
            if (shift.size() != static_cast<std::size_t>(g.dim()))
                throw DslError("left_translate: shift needs " +
                                   std::to_string(g.dim()) + " entries",
                               soff);
            return make_left_translate(g, Point(shift), std::move(base));
        }
        throw DslError("unknown function '" + name + "'", name_off);
    }
};

}  // namespace

TestFunctionPtr parse_testfun(const GroupConfig& g, const std::string& text) {
    Parser p{text, g};
    TestFunctionPtr fn = p.function();
    p.skip_ws();
    if (p.pos != text.size())
        throw DslError("trailing characters", p.pos);
    return fn;
}

}  // namespace subfrac
