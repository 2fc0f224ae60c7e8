#pragma once
// Persistent store of exact generalized Bernoulli numbers.
// File format, one record per line:  <kind> <character label> <q_0> <q_1> ... <q_{phi(m)-1}>
// where kind is B1 or B2 and q_i = "num/den" are the power-basis coefficients in Q(mu_m).
// Entries are write-once; a deterministic sample is re-derived on load to detect corruption.

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "../arith/cyclo.hpp"

namespace ptower {

class BernoulliCache {
public:
    using Deriver = std::function<CycloElem(const std::string& kind, const std::string& label, u64 order)>;

    BernoulliCache() = default;

    // Loads path if present; `derive` re-computes an entry for the spot check.
    explicit BernoulliCache(std::filesystem::path path, const Deriver& derive = {}) : path_(std::move(path)) {
        load(derive);
    }

    BernoulliCache(const BernoulliCache&) = delete;
    BernoulliCache& operator=(const BernoulliCache&) = delete;

    ~BernoulliCache() {
        try {
            flush();
        } catch (...) {
        }
    }

    static std::string key(const std::string& kind, const std::string& label) { return kind + " " + label; }

    std::optional<CycloElem> find(const std::string& kind, const std::string& label) {
        std::lock_guard<std::mutex> g(mu_);
        auto it = map_.find(key(kind, label));
        if (it == map_.end()) return std::nullopt;
        if (it->second.from_disk) ++hits_;
        return it->second.value;
    }

    void insert(const std::string& kind, const std::string& label, const CycloElem& v) {
        std::lock_guard<std::mutex> g(mu_);
        auto [it, fresh] = map_.try_emplace(key(kind, label), Entry{v, false});
        if (!fresh) {
            if (it->second.value != v) throw InternalError("Bernoulli cache: conflicting values for " + label);
            return;
        }
        pending_.push_back(it->first);
    }

    // Lookups served from entries that were on disk when the cache was opened.
    std::size_t hits() const {
        std::lock_guard<std::mutex> g(mu_);
        return hits_;
    }
    std::size_t loaded() const { return loaded_; }
    bool corruption_detected() const { return corrupt_; }
    const std::filesystem::path& path() const { return path_; }

    void flush() {
        std::lock_guard<std::mutex> g(mu_);
        if (path_.empty() || pending_.empty()) return;
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        std::ofstream out(path_, std::ios::app);
        if (!out) throw ResourceError("cannot write Bernoulli cache " + path_.string());
        std::sort(pending_.begin(), pending_.end());
        for (auto& k : pending_) out << serialize(k, map_.at(k).value) << "\n";
        pending_.clear();
    }

    static std::string serialize(const std::string& k, const CycloElem& v) {
        std::ostringstream o;
        o << k << " " << v.order();
        for (std::size_t i = 0; i < v.degree(); ++i) o << " " << to_str(v.coeff(i));
        return o.str();
    }

private:
    struct Entry {
        CycloElem value;
        bool from_disk = false;
    };

    void load(const Deriver& derive) {
        if (path_.empty() || !std::filesystem::exists(path_)) return;
        std::ifstream in(path_);
        std::string line;
        std::vector<std::pair<std::string, CycloElem>> rows;
        bool bad = false;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream s(line);
            std::string kind, label;
            u64 m = 0;
            if (!(s >> kind >> label >> m) || m == 0) {
                bad = true;
                break;
            }
            std::vector<BigRational> q;
            std::string tok;
            while (s >> tok) {
                try {
                    q.push_back(parse_rational(tok));
                } catch (const UsageError&) {
                    bad = true;
                    break;
                }
            }
            if (bad || q.size() != euler_phi(m)) {
                bad = true;
                break;
            }
            BigInt den = 1;
            for (auto& x : q) den = lcm(den, BigInt(x.get_den()));
            std::vector<BigInt> num;
            for (auto& x : q) num.push_back(x.get_num() * (den / x.get_den()));
            rows.emplace_back(key(kind, label), CycloElem::from_powers(m, std::move(num), den));
        }
        // spot check: every 16th record, plus the last one
        if (!bad && derive)
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i % 16 && i + 1 != rows.size()) continue;
                auto sp = rows[i].first.find(' ');
                std::string kind = rows[i].first.substr(0, sp), label = rows[i].first.substr(sp + 1);
                if (derive(kind, label, rows[i].second.order()) != rows[i].second) {
                    bad = true;
                    break;
                }
            }
        if (bad) {
            // drop the corrupt file's contents; recomputed values are rewritten on flush
            corrupt_ = true;
            std::filesystem::remove(path_);
            return;
        }
        for (auto& [k, v] : rows) map_.try_emplace(k, Entry{v, true});
        loaded_ = map_.size();
    }

    static BigInt lcm(const BigInt& a, const BigInt& b) {
        BigInt r;
        mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return r;
    }

    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, Entry> map_;
    std::vector<std::string> pending_;
    std::size_t hits_ = 0, loaded_ = 0;
    bool corrupt_ = false;
};

}  // namespace ptower
