#ifndef IPS_BOUNDED_QUEUE_HPP
#define IPS_BOUNDED_QUEUE_HPP

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace ips {

/// Small blocking FIFO between pipeline stages. Producers block when full,
/// consumers block when empty; close() wakes all consumers and makes pop
/// return nullopt once drained. Ordering is preserved.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    bool push(T value) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [this] { return items_.size() < capacity_ || closed_; });
        if (closed_) return false;
        items_.push_back(std::move(value));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [this] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T value = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return value;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::size_t capacity_;
    std::deque<T> items_;
    bool closed_ = false;
    std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
};

}  // namespace ips

#endif  // IPS_BOUNDED_QUEUE_HPP
