// Checkpoint layout (all integers little-endian u64 unless noted, reals IEEE-754 binary64):
//
//   magic        8 bytes  "AOTQCKPT"
//   version      u32      kVersion
//   dims         5 x u64  in_dim, hidden, value_hidden, advantage_hidden, actions
//   online       10 blocks of doubles, column-major, in DuelingParams declaration order
//   target       same as online
//   adam         u64 step_count, f64 beta1, f64 beta2, f64 eps, first moments, second moments
//   train_steps  u64
//   replay_rng   u64 length + text state of the replay std::mt19937_64
//   checksum     u64 FNV-1a over every preceding byte
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "aotuav/agent.hpp"
#include "aotuav/errors.hpp"

namespace aot {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'A', 'O', 'T', 'Q', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(const T& value) {
    buf_.append(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void put_matrix(const Eigen::MatrixXd& m) {
    buf_.append(reinterpret_cast<const char*>(m.data()), static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  void put_params(const QNet& p) {
    for_each_block([this](const Eigen::MatrixXd& m) { put_matrix(m); }, p);
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}

  template <typename T>
  T get() {
    T value;
    need(sizeof(T));
    std::memcpy(&value, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void get_matrix(Eigen::MatrixXd& m) {
    const std::size_t n = static_cast<std::size_t>(m.size()) * sizeof(double);
    need(n);
    std::memcpy(m.data(), buf_.data() + pos_, n);
    pos_ += n;
  }
  void get_params(QNet& p) {
    for_each_block([this](Eigen::MatrixXd& m) { get_matrix(m); }, p);
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw FormatError("checkpoint truncated");
  }
  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void Agent::save(const std::filesystem::path& path) const {
  Writer w;
  for (char c : kMagic) w.put(c);
  w.put(kVersion);
  w.put(static_cast<std::uint64_t>(online_.in_dim()));
  w.put(static_cast<std::uint64_t>(online_.shared_w.rows()));
  w.put(static_cast<std::uint64_t>(online_.value_hidden_w.rows()));
  w.put(static_cast<std::uint64_t>(online_.adv_hidden_w.rows()));
  w.put(static_cast<std::uint64_t>(online_.actions()));
  w.put_params(online_);
  w.put_params(target_);
  w.put(adam_.step_count);
  w.put(adam_.beta1);
  w.put(adam_.beta2);
  w.put(adam_.eps);
  w.put_params(adam_.first_moment);
  w.put_params(adam_.second_moment);
  w.put(train_steps_);
  std::ostringstream rng_state;
  rng_state << replay_rng_;
  const std::string rs = rng_state.str();
  w.put(static_cast<std::uint64_t>(rs.size()));
  std::string bytes = w.bytes() + rs;
  const std::uint64_t sum = fnv1a(bytes);
  bytes.append(reinterpret_cast<const char*>(&sum), sizeof(sum));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for checkpoint " + path.string());
}

Agent Agent::load(const std::filesystem::path& path, const AgentHyper& hyper) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t)) {
    throw FormatError(path.string() + ": not a checkpoint");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw FormatError(path.string() + ": bad magic");
  std::uint64_t stored_sum;
  std::memcpy(&stored_sum, bytes.data() + bytes.size() - sizeof(stored_sum), sizeof(stored_sum));
  bytes.resize(bytes.size() - sizeof(stored_sum));
  if (fnv1a(bytes) != stored_sum) throw FormatError(path.string() + ": checksum mismatch");

  Reader r(std::move(bytes));
  r.get_string(sizeof(kMagic));
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto in_dim = r.get<std::uint64_t>();
  AgentHyper h = hyper;
  h.hidden = r.get<std::uint64_t>();
  h.value_hidden = r.get<std::uint64_t>();
  h.advantage_hidden = r.get<std::uint64_t>();
  const auto actions = r.get<std::uint64_t>();
  if (in_dim == 0 || actions == 0 || h.hidden == 0 || h.value_hidden == 0 || h.advantage_hidden == 0 ||
      in_dim > (1u << 20) || actions > (1u << 20) || h.hidden > (1u << 20) || h.value_hidden > (1u << 20) ||
      h.advantage_hidden > (1u << 20)) {
    throw FormatError(path.string() + ": implausible layer dimensions");
  }

  Agent agent(h, in_dim, actions, 0);
  r.get_params(agent.online_);
  r.get_params(agent.target_);
  agent.adam_.step_count = r.get<std::uint64_t>();
  agent.adam_.beta1 = r.get<double>();
  agent.adam_.beta2 = r.get<double>();
  agent.adam_.eps = r.get<double>();
  r.get_params(agent.adam_.first_moment);
  r.get_params(agent.adam_.second_moment);
  agent.train_steps_ = r.get<std::uint64_t>();
  const auto rng_len = r.get<std::uint64_t>();
  std::istringstream rng_state(r.get_string(rng_len));
  rng_state >> agent.replay_rng_;
  if (!rng_state) throw FormatError(path.string() + ": corrupt RNG state");
  return agent;
}

}  // namespace aot
