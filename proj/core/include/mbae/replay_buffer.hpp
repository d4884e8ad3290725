#pragma once

#include <deque>
#include <span>
#include <vector>

#include "mbae/errors.hpp"
#include "mbae/experience.hpp"
#include "mbae/rng.hpp"

namespace mbae {

// Bounded FIFO of transitions with seeded with-replacement sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1u << 16) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("replay buffer capacity must be positive");
  }

  void push(Experience e) {
    if (buffer_.size() == capacity_) buffer_.pop_front();
    buffer_.push_back(std::move(e));
  }

  std::vector<Experience> sample(std::size_t batch_size, Rng& rng) const {
    if (buffer_.empty()) throw UsageError("sampling from an empty replay buffer");
    std::vector<Experience> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      batch.push_back(buffer_[rng.uniform_index(buffer_.size())]);
    }
    return batch;
  }

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const { return buffer_[i]; }
  void clear() { buffer_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<Experience> buffer_;
};

}  // namespace mbae
