#include "mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "textio.hpp"

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace exotorq {

using nlohmann::json;

namespace {

constexpr int kModelSchemaVersion = 1;
constexpr double kNormStdFloor = 1e-6;

const char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        const unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += kB64Alphabet[v & 63];
    }
    const std::size_t rest = data.size() - i;
    if (rest == 1) {
        const unsigned v = data[i] << 16;
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const unsigned v = (data[i] << 16) | (data[i + 1] << 8);
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    std::array<int, 256> lut;
    lut.fill(-1);
    for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kB64Alphabet[i])] = i;

    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    int acc = 0;
    int bits = 0;
    for (const char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = lut[static_cast<unsigned char>(c)];
        if (v < 0) {
            fail(Err::Parse, "invalid base64 character in weights payload");
        }
        acc = (acc << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

void append_doubles(std::vector<unsigned char>& payload, const double* data, std::size_t count) {
    const std::size_t offset = payload.size();
    payload.resize(offset + count * sizeof(double));
    std::memcpy(payload.data() + offset, data, count * sizeof(double));
}

std::vector<unsigned char> serialize_parameters(const TorqueModel& model) {
    std::vector<unsigned char> payload;
    for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
        // Eigen stores column-major; emit row-major per the file contract.
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w =
            model.weights[l];
        append_doubles(payload, w.data(), static_cast<std::size_t>(w.size()));
        append_doubles(payload, model.biases[l].data(),
                       static_cast<std::size_t>(model.biases[l].size()));
    }
    return payload;
}

Eigen::MatrixXd to_input_matrix(const std::vector<TrainSample>& batch, int input_dim) {
    Eigen::MatrixXd inputs(input_dim, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t s = 0; s < batch.size(); ++s) {
        for (int f = 0; f < input_dim; ++f) {
            inputs(f, static_cast<Eigen::Index>(s)) = batch[s].input[static_cast<std::size_t>(f)];
        }
    }
    return inputs;
}

Eigen::MatrixXd to_target_matrix(const std::vector<TrainSample>& batch, int output_dim) {
    Eigen::MatrixXd targets(output_dim, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t s = 0; s < batch.size(); ++s) {
        for (int f = 0; f < output_dim; ++f) {
            targets(f, static_cast<Eigen::Index>(s)) =
                batch[s].target[static_cast<std::size_t>(f)];
        }
    }
    return targets;
}

struct ForwardPass {
    Eigen::MatrixXd normalized;                   ///< standardized inputs
    std::vector<Eigen::MatrixXd> preactivations;  ///< z_l per layer
    std::vector<Eigen::MatrixXd> activations;     ///< post-activation per layer; back() is output
};

ForwardPass run_forward(const TorqueModel& model, const Eigen::MatrixXd& inputs) {
    if (inputs.rows() != model.input_dim()) {
        fail(Err::DimensionMismatch, "input has " + std::to_string(inputs.rows()) +
                                         " features, model expects " +
                                         std::to_string(model.input_dim()));
    }
    ForwardPass fp;
    fp.normalized = (inputs.colwise() - model.norm_mean).array().colwise() /
                    model.norm_std.array();

    const std::size_t n_layers = model.weights.size();
    fp.preactivations.resize(n_layers);
    fp.activations.resize(n_layers);
    const Eigen::MatrixXd* prev = &fp.normalized;
    for (std::size_t l = 0; l < n_layers; ++l) {
        fp.preactivations[l] = (model.weights[l] * (*prev)).colwise() + model.biases[l];
        if (l + 1 < n_layers) {
            fp.activations[l] = fp.preactivations[l].cwiseMax(0.0); // ReLU
        } else {
            fp.activations[l] = fp.preactivations[l].array().tanh();
        }
        prev = &fp.activations[l];
    }
    return fp;
}

} // namespace

void TorqueModel::validate() const {
    if (layer_dims.size() < 2) {
        fail(Err::DimensionMismatch, "model needs at least input and output layers");
    }
    if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
        fail(Err::DimensionMismatch, "weight/bias count does not match layer_dims");
    }
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l]) {
            fail(Err::DimensionMismatch, "weight " + std::to_string(l) + " has shape " +
                                             std::to_string(weights[l].rows()) + "x" +
                                             std::to_string(weights[l].cols()));
        }
        if (biases[l].size() != layer_dims[l + 1]) {
            fail(Err::DimensionMismatch, "bias " + std::to_string(l) + " has length " +
                                             std::to_string(biases[l].size()));
        }
    }
    if (norm_mean.size() != layer_dims.front() || norm_std.size() != layer_dims.front()) {
        fail(Err::DimensionMismatch, "input_norm length does not match input dimension");
    }
    for (Eigen::Index i = 0; i < norm_std.size(); ++i) {
        if (!(norm_std[i] > 0.0)) {
            fail(Err::InvalidArgument, "input_norm std must be positive at feature " +
                                           std::to_string(i));
        }
    }
    if (!(tau_max_nm > 0.0)) {
        fail(Err::NonPositiveMax, "tau_max_nm must be positive");
    }
}

TorqueModel zero_model(const std::vector<int>& dims) {
    TorqueModel m;
    m.layer_dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        m.weights.emplace_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
        m.biases.emplace_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    m.norm_mean = Eigen::VectorXd::Zero(dims.front());
    m.norm_std = Eigen::VectorXd::Ones(dims.front());
    m.validate();
    return m;
}

TorqueModel init_model(const std::vector<int>& dims, Rng& rng) {
    TorqueModel m = zero_model(dims);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        // Row-major draw order so the parameter sequence is seed-stable.
        for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) {
                m.weights[l](r, c) = rng.uniform(-bound, bound);
            }
        }
    }
    return m;
}

std::vector<FeatureWindow> build_windows(const Trial& trial, double delay_s) {
    if (std::abs(trial.sample_rate_hz - kWorkingRateHz) > 1e-6) {
        fail(Err::RateMismatch, "trial rate " + fmt_g17(trial.sample_rate_hz) +
                                    " Hz, window construction requires " +
                                    fmt_g17(kWorkingRateHz) + " Hz");
    }
    if (!trial.velocities_rad_s) {
        fail(Err::MissingVelocities, "trial has no velocity channels");
    }
    const std::size_t n = trial.size();
    if (n < static_cast<std::size_t>(kHistorySteps)) {
        fail(Err::TooShort, "trial has " + std::to_string(n) + " samples, need at least " +
                                std::to_string(kHistorySteps));
    }
    if (!(delay_s >= 0.0)) {
        fail(Err::InvalidArgument, "delay feature must be >= 0");
    }

    const ChannelSet& vel = *trial.velocities_rad_s;
    std::vector<FeatureWindow> windows(n - kHistorySteps + 1);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        FeatureWindow& fw = windows[w];
        std::size_t f = 0;
        for (int s = 0; s < kHistorySteps; ++s) {
            const std::size_t i = w + static_cast<std::size_t>(s);
            for (std::size_t j = 0; j < kJointCount; ++j) {
                fw[f++] = trial.angles_rad[j][i];
                fw[f++] = vel[j][i];
            }
        }
        fw[f] = delay_s;
    }
    return windows;
}

Eigen::MatrixXd forward_batch(const TorqueModel& model, const Eigen::MatrixXd& inputs) {
    return run_forward(model, inputs).activations.back();
}

std::array<UniformSeries, kJointCount> infer_trial(const TorqueModel& model, const Trial& trial,
                                                   double delay_feature_s) {
    if (model.input_dim() != kFeatureCount || model.output_dim() != int(kJointCount)) {
        fail(Err::DimensionMismatch, "inference requires a 33-in/4-out model");
    }
    const auto windows = build_windows(trial, delay_feature_s);
    Eigen::MatrixXd in(kFeatureCount, static_cast<Eigen::Index>(windows.size()));
    for (std::size_t w = 0; w < windows.size(); ++w) {
        for (int f = 0; f < kFeatureCount; ++f) {
            in(f, static_cast<Eigen::Index>(w)) = windows[w][static_cast<std::size_t>(f)];
        }
    }
    const Eigen::MatrixXd out = forward_batch(model, in);

    std::array<UniformSeries, kJointCount> series;
    const double start = trial.time_s[static_cast<std::size_t>(kHistorySteps) - 1];
    for (std::size_t j = 0; j < kJointCount; ++j) {
        series[j].rate_hz = trial.sample_rate_hz;
        series[j].start_s = start;
        series[j].values.resize(windows.size());
        for (std::size_t w = 0; w < windows.size(); ++w) {
            series[j].values[w] = out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(w));
        }
    }
    return series;
}

std::array<double, kJointCount> forward(const TorqueModel& model, const FeatureWindow& window) {
    Eigen::MatrixXd in(model.input_dim(), 1);
    if (model.input_dim() != kFeatureCount) {
        fail(Err::DimensionMismatch, "forward(FeatureWindow) requires a 33-input model");
    }
    for (int f = 0; f < kFeatureCount; ++f) in(f, 0) = window[static_cast<std::size_t>(f)];
    const Eigen::MatrixXd out = forward_batch(model, in);
    std::array<double, kJointCount> result{};
    for (std::size_t j = 0; j < kJointCount; ++j) result[j] = out(static_cast<Eigen::Index>(j), 0);
    return result;
}

double loss_on(const TorqueModel& model, const Eigen::MatrixXd& inputs,
               const Eigen::MatrixXd& targets, double w_reg) {
    if (inputs.cols() == 0) {
        fail(Err::EmptyBatch, "loss over an empty batch");
    }
    if (targets.rows() != model.output_dim() || targets.cols() != inputs.cols()) {
        fail(Err::DimensionMismatch, "target shape does not match model output/batch");
    }
    const Eigen::MatrixXd out = forward_batch(model, inputs);
    const double fit = (targets - out).squaredNorm();
    const double reg = w_reg * out.squaredNorm();
    return (fit + reg) / static_cast<double>(inputs.cols());
}

double loss(const TorqueModel& model, const std::vector<TrainSample>& batch, double w_reg) {
    if (batch.empty()) {
        fail(Err::EmptyBatch, "loss over an empty batch");
    }
    return loss_on(model, to_input_matrix(batch, model.input_dim()),
                   to_target_matrix(batch, model.output_dim()), w_reg);
}

Gradients grad_on(const TorqueModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, double w_reg) {
    if (inputs.cols() == 0) {
        fail(Err::EmptyBatch, "gradient over an empty batch");
    }
    if (targets.rows() != model.output_dim() || targets.cols() != inputs.cols()) {
        fail(Err::DimensionMismatch, "target shape does not match model output/batch");
    }

    const ForwardPass fp = run_forward(model, inputs);
    const std::size_t n_layers = model.weights.size();
    const double inv_batch = 1.0 / static_cast<double>(inputs.cols());

    Gradients g;
    g.d_weights.resize(n_layers);
    g.d_biases.resize(n_layers);

    const Eigen::MatrixXd& out = fp.activations.back();
    // d(mean ||t - y||^2 + w_reg ||y||^2)/dy = (2(y - t) + 2 w_reg y) / B
    Eigen::MatrixXd delta =
        ((2.0 * (out - targets) + 2.0 * w_reg * out).array() * (1.0 - out.array().square()))
            .matrix() *
        inv_batch;

    for (std::size_t l = n_layers; l-- > 0;) {
        const Eigen::MatrixXd& below = l == 0 ? fp.normalized : fp.activations[l - 1];
        g.d_weights[l] = delta * below.transpose();
        g.d_biases[l] = delta.rowwise().sum();
        if (l > 0) {
            const Eigen::MatrixXd back = model.weights[l].transpose() * delta;
            delta = (back.array() * (fp.preactivations[l - 1].array() > 0.0).cast<double>())
                        .matrix();
        }
    }
    return g;
}

Gradients grad(const TorqueModel& model, const std::vector<TrainSample>& batch, double w_reg) {
    if (batch.empty()) {
        fail(Err::EmptyBatch, "gradient over an empty batch");
    }
    return grad_on(model, to_input_matrix(batch, model.input_dim()),
                   to_target_matrix(batch, model.output_dim()), w_reg);
}

void TrainConfig::validate() const {
    if (w_reg < 0.0) fail(Err::InvalidArgument, "w_reg must be >= 0");
    if (!(learning_rate >= 0.0)) fail(Err::InvalidArgument, "learning_rate must be >= 0");
    if (batch_size <= 0) fail(Err::InvalidArgument, "batch_size must be positive");
    if (epochs <= 0) fail(Err::InvalidArgument, "epochs must be positive");
}

TrainResult train(const std::vector<TrainSample>& samples, const TrainConfig& cfg) {
    cfg.validate();
    if (samples.size() < static_cast<std::size_t>(cfg.batch_size)) {
        fail(Err::InsufficientSamples, "have " + std::to_string(samples.size()) +
                                           " samples, batch_size is " +
                                           std::to_string(cfg.batch_size));
    }

    Rng rng(cfg.seed);
    TorqueModel model = init_model(kPolicyLayerDims, rng);

    const Eigen::MatrixXd inputs = to_input_matrix(samples, model.input_dim());
    const Eigen::MatrixXd targets = to_target_matrix(samples, model.output_dim());
    const auto n = inputs.cols();

    // Training-set statistics, fixed before optimization.
    model.norm_mean = inputs.rowwise().mean();
    for (Eigen::Index f = 0; f < inputs.rows(); ++f) {
        const double var =
            (inputs.row(f).array() - model.norm_mean[f]).square().sum() / static_cast<double>(n);
        model.norm_std[f] = std::max(std::sqrt(var), kNormStdFloor);
    }

    std::vector<Eigen::MatrixXd> vel_w;
    std::vector<Eigen::VectorXd> vel_b;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        vel_w.emplace_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
        vel_b.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    }

    TrainResult result;
    result.initial_loss = loss_on(model, inputs, targets, cfg.w_reg);
    result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);

    Eigen::MatrixXd batch_in(inputs.rows(), cfg.batch_size);
    Eigen::MatrixXd batch_tg(targets.rows(), cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const auto count = static_cast<Eigen::Index>(
                std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                      order.size() - begin));
            for (Eigen::Index k = 0; k < count; ++k) {
                batch_in.col(k) = inputs.col(order[begin + static_cast<std::size_t>(k)]);
                batch_tg.col(k) = targets.col(order[begin + static_cast<std::size_t>(k)]);
            }
            const Gradients g = grad_on(model, batch_in.leftCols(count),
                                        batch_tg.leftCols(count), cfg.w_reg);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                vel_w[l] = kMomentum * vel_w[l] - cfg.learning_rate * g.d_weights[l];
                vel_b[l] = kMomentum * vel_b[l] - cfg.learning_rate * g.d_biases[l];
                model.weights[l] += vel_w[l];
                model.biases[l] += vel_b[l];
            }
        }
        result.loss_history.push_back(loss_on(model, inputs, targets, cfg.w_reg));
    }

    result.model = std::move(model);
    return result;
}

unsigned long model_payload_crc(const TorqueModel& model) {
    const auto payload = serialize_parameters(model);
    return crc32_of(payload.data(), payload.size());
}

void save_model(const TorqueModel& model, const std::string& path) {
    model.validate();
    const auto payload = serialize_parameters(model);

    json j;
    j["schema_version"] = kModelSchemaVersion;
    j["layer_dims"] = model.layer_dims;
    std::vector<std::string> activations(model.weights.size() - 1, "relu");
    activations.push_back("tanh");
    j["activations"] = activations;
    j["feature_order_tag"] = model.feature_order_tag;
    j["tau_max_nm"] = model.tau_max_nm;
    j["input_norm"]["mean"] = std::vector<double>(model.norm_mean.data(),
                                                  model.norm_mean.data() + model.norm_mean.size());
    j["input_norm"]["std"] = std::vector<double>(model.norm_std.data(),
                                                 model.norm_std.data() + model.norm_std.size());
    j["weights_b64"] = base64_encode(payload);
    j["checksum"] = crc32_of(payload.data(), payload.size());
    write_text_file_atomic(path, j.dump(2) + "\n");
}

TorqueModel load_model(const std::string& path, bool allow_any_dims) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        fail(Err::Parse, path + ": " + e.what());
    }

    TorqueModel model;
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kModelSchemaVersion) {
            fail(Err::SchemaVersionMismatch, path + ": schema_version " + std::to_string(version) +
                                                 ", expected " +
                                                 std::to_string(kModelSchemaVersion));
        }
        model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        if (!allow_any_dims && model.layer_dims != kPolicyLayerDims) {
            fail(Err::ShapeError,
                 path + ": layer_dims do not match the fixed policy architecture");
        }
        if (model.layer_dims.size() < 2) {
            fail(Err::ShapeError, path + ": layer_dims too short");
        }
        model.feature_order_tag = j.at("feature_order_tag").get<std::string>();
        model.tau_max_nm = j.at("tau_max_nm").get<double>();
        const auto mean = j.at("input_norm").at("mean").get<std::vector<double>>();
        const auto stdv = j.at("input_norm").at("std").get<std::vector<double>>();
        if (mean.size() != static_cast<std::size_t>(model.layer_dims.front()) ||
            stdv.size() != mean.size()) {
            fail(Err::ShapeError, path + ": input_norm length mismatch");
        }
        model.norm_mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                            static_cast<Eigen::Index>(mean.size()));
        model.norm_std = Eigen::Map<const Eigen::VectorXd>(stdv.data(),
                                                           static_cast<Eigen::Index>(stdv.size()));

        const auto payload = base64_decode(j.at("weights_b64").get<std::string>());
        const auto stored_crc = j.at("checksum").get<unsigned long>();
        if (crc32_of(payload.data(), payload.size()) != stored_crc) {
            fail(Err::ChecksumMismatch, path + ": weights payload checksum mismatch");
        }

        std::size_t expected = 0;
        for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
            expected += static_cast<std::size_t>(model.layer_dims[l]) *
                            static_cast<std::size_t>(model.layer_dims[l + 1]) +
                        static_cast<std::size_t>(model.layer_dims[l + 1]);
        }
        if (payload.size() != expected * sizeof(double)) {
            fail(Err::ShapeError, path + ": weights payload has " +
                                      std::to_string(payload.size()) + " bytes, expected " +
                                      std::to_string(expected * sizeof(double)));
        }

        const auto* cursor = reinterpret_cast<const double*>(payload.data());
        for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
            const int rows = model.layer_dims[l + 1];
            const int cols = model.layer_dims[l];
            Eigen::MatrixXd w(rows, cols);
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) w(r, c) = *cursor++;
            }
            model.weights.push_back(std::move(w));
            Eigen::VectorXd b(rows);
            for (int r = 0; r < rows; ++r) b[r] = *cursor++;
            model.biases.push_back(std::move(b));
        }
    } catch (const json::exception& e) {
        fail(Err::Parse, path + ": " + e.what());
    }
    model.validate();
    return model;
}

} // namespace exotorq
