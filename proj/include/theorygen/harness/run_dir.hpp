#pragma once

#include <filesystem>

#include "theorygen/core/types.hpp"
#include "theorygen/gateway/ledger.hpp"

namespace theorygen {

/// A run directory. Layout:
///
///   manifest.json            written before any stage executes
///   config.json              the effective configuration (digest in manifest)
///   ledger.jsonl             append-order cost ledger
///   timings.jsonl            wall-clock per stage (excluded from run digest)
///   queries/                 one file per theory query
///   corpus/<qid>/manifest.json + papers/<paper_id>.json
///   schemas/<qid>.json
///   extractions/<qid>/<uuid>.json
///   theories/<theory_id>.json
///   quarantine/              laws removed by the self-novelty filter + summary
///   evals/{judge,backtest,novelty,overlap}/
///   reports/
///   cache/                   gateway response cache
///   markers/<stage>.done     stage completion markers
///   .lock                    single-writer lock
///
/// Every stage output references its inputs by digest inside the marker file;
/// a completed stage is skipped on rerun.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    void ensure_layout() const;

    std::filesystem::path path(const std::string& relative) const { return root_ / relative; }
    bool exists(const std::string& relative) const;
    std::vector<std::string> list_files(const std::string& relative_dir) const;  // sorted names

    void write_json(const std::string& relative, const json& j) const;
    json read_json(const std::string& relative) const;
    void write_text(const std::string& relative, const std::string& text) const;
    std::string read_text(const std::string& relative) const;

    bool stage_complete(const std::string& stage) const;
    void mark_stage_complete(const std::string& stage, const json& details) const;

    void save_ledger(const CostLedger& ledger) const;
    CostLedger load_ledger(PriceTable prices) const;

    void append_timing(const std::string& stage, double seconds) const;

    /// SHA-256 over (sorted relative path, content hash) pairs of every file
    /// except the lock file and timings.jsonl. Byte-identical runs produce
    /// identical digests regardless of the absolute location.
    std::string run_digest() const;

    /// Single-writer exclusion: throws StageError when another process holds
    /// the lock. The guard removes the lock on destruction.
    class Lock {
    public:
        explicit Lock(std::filesystem::path lock_file);
        ~Lock();
        Lock(const Lock&) = delete;
        Lock& operator=(const Lock&) = delete;

    private:
        std::filesystem::path lock_file_;
    };
    [[nodiscard]] Lock acquire_lock() const;

private:
    std::filesystem::path root_;
};

}  // namespace theorygen
