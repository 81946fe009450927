#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <type_traits>
#include <utility>

#include "cefr/store.hpp"

namespace cefr {

/// Single-writer, many-reader holder for a Store.
///
/// Readers take an immutable snapshot and never block the writer. A write
/// runs against a private copy of the current store; the copy is published
/// only if the mutation (and the commit hook, typically persistence) returns
/// normally, so a failed write leaves no partial state behind.
class Repository {
public:
    using CommitHook = std::function<void(const Store&)>;

    explicit Repository(Store initial = Store{})
        : current_(std::make_shared<const Store>(std::move(initial)))
    {
    }

    std::shared_ptr<const Store> snapshot() const
    {
        std::lock_guard lock(publish_mutex_);
        return current_;
    }

    void set_commit_hook(CommitHook hook)
    {
        std::lock_guard lock(write_mutex_);
        commit_hook_ = std::move(hook);
    }

    template <class Mutation>
    decltype(auto) write(Mutation&& mutation)
    {
        std::lock_guard lock(write_mutex_);
        auto next = std::make_shared<Store>(*snapshot());
        if constexpr (std::is_void_v<std::invoke_result_t<Mutation, Store&>>) {
            std::forward<Mutation>(mutation)(*next);
            commit(std::move(next));
        } else {
            auto result = std::forward<Mutation>(mutation)(*next);
            commit(std::move(next));
            return result;
        }
    }

private:
    void commit(std::shared_ptr<Store> next)
    {
        if (commit_hook_) {
            commit_hook_(*next);
        }
        std::lock_guard lock(publish_mutex_);
        current_ = std::move(next);
    }

    mutable std::mutex publish_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const Store> current_;
    CommitHook commit_hook_;
};

} // namespace cefr
