#include "theorygen/harness/run_dir.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "theorygen/core/digest.hpp"

namespace theorygen {

namespace fs = std::filesystem;

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {}

void RunDirectory::ensure_layout() const {
    for (const char* dir :
         {"queries", "corpus", "schemas", "extractions", "theories", "quarantine", "evals/judge",
          "evals/backtest", "evals/novelty", "evals/overlap", "reports", "cache", "markers"}) {
        fs::create_directories(root_ / dir);
    }
}

bool RunDirectory::exists(const std::string& relative) const {
    return fs::exists(root_ / relative);
}

std::vector<std::string> RunDirectory::list_files(const std::string& relative_dir) const {
    std::vector<std::string> names;
    fs::path dir = root_ / relative_dir;
    if (!fs::exists(dir)) return names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

void RunDirectory::write_text(const std::string& relative, const std::string& text) const {
    fs::path target = root_ / relative;
    fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StageError("harness", "cannot write " + target.string());
        out << text;
    }
    fs::rename(tmp, target);
}

std::string RunDirectory::read_text(const std::string& relative) const {
    std::ifstream in(root_ / relative, std::ios::binary);
    if (!in) throw StageError("harness", "cannot read " + (root_ / relative).string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void RunDirectory::write_json(const std::string& relative, const json& j) const {
    write_text(relative, canonical_dump(j));
}

json RunDirectory::read_json(const std::string& relative) const {
    return parse_json(read_text(relative));
}

bool RunDirectory::stage_complete(const std::string& stage) const {
    return exists("markers/" + stage + ".done");
}

void RunDirectory::mark_stage_complete(const std::string& stage, const json& details) const {
    json j = details;
    j["stage"] = stage;
    write_json("markers/" + stage + ".done", j);
}

void RunDirectory::save_ledger(const CostLedger& ledger) const {
    write_text("ledger.jsonl", ledger.to_jsonl());
}

CostLedger RunDirectory::load_ledger(PriceTable prices) const {
    if (!exists("ledger.jsonl")) return CostLedger(std::move(prices));
    return CostLedger::from_jsonl(read_text("ledger.jsonl"), std::move(prices));
}

void RunDirectory::append_timing(const std::string& stage, double seconds) const {
    std::ofstream out(root_ / "timings.jsonl", std::ios::app);
    json j;
    j["stage"] = stage;
    j["seconds"] = seconds;
    out << j.dump() << "\n";
}

std::string RunDirectory::run_digest() const {
    std::vector<std::pair<std::string, fs::path>> files;
    for (const auto& entry : fs::recursive_directory_iterator(root_)) {
        if (!entry.is_regular_file()) continue;
        std::string rel = fs::relative(entry.path(), root_).generic_string();
        if (rel == ".lock" || rel == "timings.jsonl") continue;
        files.emplace_back(rel, entry.path());
    }
    std::sort(files.begin(), files.end());
    std::string accumulator;
    for (const auto& [rel, full] : files) {
        std::ifstream in(full, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        accumulator += rel + "\n" + sha256_hex(buf.str()) + "\n";
    }
    return sha256_hex(accumulator);
}

RunDirectory::Lock::Lock(std::filesystem::path lock_file) : lock_file_(std::move(lock_file)) {
    int fd = ::open(lock_file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw StageError("harness", "run directory is locked by another process (" +
                                        lock_file_.string() + ")");
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

RunDirectory::Lock::~Lock() {
    std::error_code ec;
    fs::remove(lock_file_, ec);
}

RunDirectory::Lock RunDirectory::acquire_lock() const {
    fs::create_directories(root_);
    return Lock(root_ / ".lock");
}

}  // namespace theorygen
