#include "ada/checkpoint.hpp"

#include "ada/error.hpp"
#include "ada/util.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace ada {

namespace {

constexpr char kMagic[4] = {'A', 'D', 'M', 'C'};
constexpr std::uint8_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw io_error("cannot open checkpoint for writing: " + path);
    }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
    void i64(std::int64_t v) { raw(&v, sizeof(v)); }
    void f64(double v) { raw(&v, sizeof(v)); }
    void bytes(const void* data, std::size_t n) { raw(data, n); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void f64_vec(const std::vector<double>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(double));
    }
    void u32_vec(const std::vector<std::uint32_t>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(std::uint32_t));
    }
    void check() {
        if (!out_) throw io_error("checkpoint write failed");
    }

private:
    void raw(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw io_error("cannot open checkpoint: " + path);
    }
    std::uint8_t u8() {
        char c;
        get(&c, 1);
        return static_cast<std::uint8_t>(c);
    }
    std::uint64_t u64() {
        std::uint64_t v;
        get(&v, sizeof(v));
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        get(&v, sizeof(v));
        return v;
    }
    double f64() {
        double v;
        get(&v, sizeof(v));
        return v;
    }
    std::string str() {
        std::uint64_t n = u64();
        std::string s(n, '\0');
        get(s.data(), n);
        return s;
    }
    std::vector<double> f64_vec() {
        std::uint64_t n = u64();
        std::vector<double> v(n);
        get(v.data(), n * sizeof(double));
        return v;
    }
    std::vector<std::uint32_t> u32_vec() {
        std::uint64_t n = u64();
        std::vector<std::uint32_t> v(n);
        get(v.data(), n * sizeof(std::uint32_t));
        return v;
    }

private:
    void get(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            throw io_error("checkpoint truncated");
    }
    std::ifstream in_;
};

void write_net(Writer& w, const Net& net) {
    w.u64(net.layers.size());
    for (const Layer& l : net.layers) {
        w.u64(l.in);
        w.u64(l.out);
        w.u8(static_cast<std::uint8_t>(l.act));
        w.f64_vec(l.w);
        w.f64_vec(l.b);
    }
}

Net read_net(Reader& r) {
    Net net;
    std::uint64_t n = r.u64();
    net.layers.resize(n);
    for (Layer& l : net.layers) {
        l.in = r.u64();
        l.out = r.u64();
        l.act = static_cast<Activation>(r.u8());
        l.w = r.f64_vec();
        l.b = r.f64_vec();
        if (l.w.size() != l.in * l.out || l.b.size() != l.out)
            throw compatibility_error("checkpoint layer shape mismatch");
    }
    return net;
}

void write_adam(Writer& w, const AdamState& st) {
    w.i64(st.step_count);
    w.f64(st.beta1);
    w.f64(st.beta2);
    w.f64(st.epsilon);
    w.u64(st.first_moment.size());
    for (std::size_t i = 0; i < st.first_moment.size(); ++i) {
        w.f64_vec(st.first_moment[i].w);
        w.f64_vec(st.first_moment[i].b);
        w.f64_vec(st.second_moment[i].w);
        w.f64_vec(st.second_moment[i].b);
    }
}

AdamState read_adam(Reader& r) {
    AdamState st;
    st.step_count = r.i64();
    st.beta1 = r.f64();
    st.beta2 = r.f64();
    st.epsilon = r.f64();
    std::uint64_t n = r.u64();
    st.first_moment.resize(n);
    st.second_moment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        st.first_moment[i].w = r.f64_vec();
        st.first_moment[i].b = r.f64_vec();
        st.second_moment[i].w = r.f64_vec();
        st.second_moment[i].b = r.f64_vec();
    }
    return st;
}

void write_obs(Writer& w, const Observation& obs) {
    w.i64(obs.dim);
    w.i64(obs.hot);
}

Observation read_obs(Reader& r) {
    Observation obs;
    obs.dim = static_cast<int>(r.i64());
    obs.hot = static_cast<int>(r.i64());
    return obs;
}

} // namespace

void save_checkpoint(const std::string& path, const RunConfig& cfg, const TrainerState& state) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u8(kVersion);
    w.str(serialize_config(cfg));

    write_net(w, state.policy.trunk);
    write_net(w, state.policy.pi_head);
    write_net(w, state.policy.v_ext_head);
    write_net(w, state.policy.v_int_head);
    write_adam(w, state.policy.adam_trunk);
    write_adam(w, state.policy.adam_pi);
    write_adam(w, state.policy.adam_v_ext);
    write_adam(w, state.policy.adam_v_int);

    write_net(w, state.pred.net);
    write_adam(w, state.pred.adam);
    w.i64(state.pred.train_steps);
    write_net(w, state.refl.net);
    write_adam(w, state.refl.adam);
    w.i64(state.refl.train_steps);

    write_net(w, state.curiosity.net);
    w.u64(state.curiosity.latent_layer);
    w.f64(state.curiosity.lambda_l1);
    write_adam(w, state.curiosity.adam);
    w.i64(state.curiosity.train_steps);

    w.u64(state.mbuf.capacity());
    w.u64(state.mbuf.size());
    for (const Trajectory& t : state.mbuf.entries()) {
        w.u64(t.steps.size());
        for (const TrajStep& s : t.steps) {
            write_obs(w, s.obs);
            w.i64(s.action);
            w.f64(s.reward);
        }
        w.f64(t.total_return);
        w.i64(t.effective_length);
        w.u8(static_cast<std::uint8_t>(t.terminal_kind));
    }

    w.u64(state.rbuf.capacity());
    w.u64(state.rbuf.size());
    for (const FailurePair& p : state.rbuf.entries()) {
        write_obs(w, p.obs);
        w.i64(p.action);
    }

    w.f64(state.normalizer.count);
    w.f64(state.normalizer.mean);
    w.f64(state.normalizer.m2);
    w.f64(state.normalizer.warmup_count);

    w.u32_vec(state.aggregate_heatmap);
    w.i64(state.episode_counter);
    w.i64(state.fall_counter);
    w.i64(state.updates_done);
    w.u64(state.action_rng_state);
    w.check();
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw compatibility_error("not a checkpoint file: " + path);
    std::uint8_t version = r.u8();
    if (version != kVersion)
        throw compatibility_error("unsupported checkpoint version " + std::to_string(version));

    LoadedCheckpoint out;
    out.cfg = parse_config_text(r.str(), {});
    TrainerState& st = out.state;
    st.spec = out.cfg.grid_spec();

    st.policy.trunk = read_net(r);
    st.policy.pi_head = read_net(r);
    st.policy.v_ext_head = read_net(r);
    st.policy.v_int_head = read_net(r);
    st.policy.adam_trunk = read_adam(r);
    st.policy.adam_pi = read_adam(r);
    st.policy.adam_v_ext = read_adam(r);
    st.policy.adam_v_int = read_adam(r);

    st.pred.net = read_net(r);
    st.pred.adam = read_adam(r);
    st.pred.train_steps = r.i64();
    st.refl.net = read_net(r);
    st.refl.adam = read_adam(r);
    st.refl.train_steps = r.i64();

    st.curiosity.net = read_net(r);
    st.curiosity.latent_layer = r.u64();
    st.curiosity.lambda_l1 = r.f64();
    st.curiosity.adam = read_adam(r);
    st.curiosity.train_steps = r.i64();

    std::size_t m_cap = r.u64();
    std::size_t m_size = r.u64();
    std::vector<Trajectory> entries(m_size);
    for (Trajectory& t : entries) {
        std::size_t n_steps = r.u64();
        t.steps.resize(n_steps);
        for (TrajStep& s : t.steps) {
            s.obs = read_obs(r);
            s.action = static_cast<int>(r.i64());
            s.reward = r.f64();
        }
        t.total_return = r.f64();
        t.effective_length = static_cast<int>(r.i64());
        t.terminal_kind = static_cast<TerminalKind>(r.u8());
    }
    st.mbuf.restore(m_cap, std::move(entries));

    std::size_t r_cap = r.u64();
    std::size_t r_size = r.u64();
    std::deque<FailurePair> pairs;
    for (std::size_t i = 0; i < r_size; ++i) {
        FailurePair p;
        p.obs = read_obs(r);
        p.action = static_cast<int>(r.i64());
        pairs.push_back(p);
    }
    st.rbuf.restore(r_cap, std::move(pairs));

    st.normalizer.count = r.f64();
    st.normalizer.mean = r.f64();
    st.normalizer.m2 = r.f64();
    st.normalizer.warmup_count = r.f64();

    st.aggregate_heatmap = r.u32_vec();
    st.episode_counter = r.i64();
    st.fall_counter = r.i64();
    st.updates_done = static_cast<int>(r.i64());
    st.action_rng_state = r.u64();
    return out;
}

} // namespace ada
