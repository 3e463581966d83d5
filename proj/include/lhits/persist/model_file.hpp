#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lhits/core/model.hpp"
#include "lhits/persist/binary.hpp"

namespace lhits::persist {

using Json = nlohmann::json;

inline constexpr char kModelMagic[4] = {'L', 'H', 'T', 'M'};
inline constexpr unsigned char kModelVersion = 1;

/// Provenance stored alongside the weights.
struct ModelMetadata {
    std::uint64_t seed = 0;
    std::string fingerprint;
    Json config = Json::object();
};

struct LoadedModel {
    LhitsModel model;
    ModelMetadata metadata;
};

namespace detail {

inline Json mlp_header(const nn::MlpParams& p)
{
    return Json{{"dims", p.dims}, {"activation", nn::to_string(p.activation)}};
}

inline void put_mlp(Bytes& out, const nn::MlpParams& p)
{
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        const Matrix& w = p.weights[l];
        for (Eigen::Index i = 0; i < w.size(); ++i)
            put_f64(out, w.data()[i]);
        for (Eigen::Index i = 0; i < p.biases[l].size(); ++i)
            put_f64(out, p.biases[l](i));
    }
}

inline nn::MlpParams mlp_from_header(const Json& h, const std::string& what)
{
    auto dims = h.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() < 2)
        throw FormatError(what + ": fewer than two layer dims", 0);
    for (auto d : dims)
        if (d == 0 || d > (std::size_t{1} << 24))
            throw FormatError(what + ": implausible layer dim " + std::to_string(d), 0);
    return nn::MlpParams::zeros(std::move(dims), nn::activation_from_string(h.at("activation").get<std::string>()));
}

inline void read_mlp(Reader& in, nn::MlpParams& p)
{
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        in.f64_block(p.weights[l].data(), static_cast<std::size_t>(p.weights[l].size()));
        in.f64_block(p.biases[l].data(), static_cast<std::size_t>(p.biases[l].size()));
    }
}

} // namespace detail

/// Layout: "LHTM", version byte, u64 header length, JSON header, then every
/// weight and bias as little-endian f64 in header order (encoder, decoder,
/// steppers in bank order; per layer W row-major then b).
inline Bytes encode_model(const LhitsModel& model, const ModelMetadata& meta = {})
{
    model.validate();
    Json h;
    h["format"] = "lhits-model";
    h["system"] = pde::to_string(model.system);
    h["state_dim"] = model.state_dim();
    h["latent_dim"] = model.latent_dim();
    h["identity_coder"] = model.identity_coder();
    h["normalizer"] = {{"mode", pde::to_string(model.normalizer.mode)},
                       {"means", std::vector<double>(model.normalizer.means.data(),
                                                     model.normalizer.means.data() + model.normalizer.means.size())},
                       {"stds", std::vector<double>(model.normalizer.stds.data(),
                                                    model.normalizer.stds.data() + model.normalizer.stds.size())}};
    if (model.coder) {
        h["encoder"] = detail::mlp_header(model.coder->encoder);
        h["decoder"] = detail::mlp_header(model.coder->decoder);
    }
    h["dt"] = model.bank.dt;
    h["steppers"] = Json::array();
    for (const auto& s : model.bank.steppers) {
        Json j = detail::mlp_header(s.body);
        j["step"] = s.step_multiple;
        h["steppers"].push_back(j);
    }
    h["plan"] = {{"active_indices", model.plan.active_indices},
                 {"interpolant", hits::to_string(model.plan.interpolant)},
                 {"horizon", model.plan.horizon}};
    h["seed"] = meta.seed;
    h["fingerprint"] = meta.fingerprint;
    h["config"] = meta.config;

    Bytes blob;
    if (model.coder) {
        detail::put_mlp(blob, model.coder->encoder);
        detail::put_mlp(blob, model.coder->decoder);
    }
    for (const auto& s : model.bank.steppers)
        detail::put_mlp(blob, s.body);
    h["blob_doubles"] = blob.size() / 8;

    const std::string header = h.dump();
    Bytes out(kModelMagic, kModelMagic + 4);
    out.push_back(kModelVersion);
    put_u64(out, header.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), blob.begin(), blob.end());
    return out;
}

inline LoadedModel decode_model(const Bytes& bytes)
{
    Reader in(bytes);
    if (in.text(4, "magic") != std::string(kModelMagic, 4))
        throw FormatError("not a model file (bad magic)", 0);
    if (const auto v = in.u8("version"); v != kModelVersion)
        throw FormatError("unsupported model version " + std::to_string(v), 4);
    const std::uint64_t header_len = in.u64("header length");
    const std::size_t header_offset = in.offset();
    if (header_len > in.remaining())
        throw FormatError("truncated header: length " + std::to_string(header_len) + " exceeds file", header_offset);
    const std::string text = in.text(static_cast<std::size_t>(header_len), "header");

    LoadedModel out;
    LhitsModel& m = out.model;
    std::size_t blob_doubles = 0;
    try {
        const Json h = Json::parse(text);
        if (h.at("format") != "lhits-model")
            throw FormatError("header format is not lhits-model", header_offset);
        m.system = pde::system_from_string(h.at("system").get<std::string>());
        const auto& nz = h.at("normalizer");
        m.normalizer.mode = pde::normalizer_mode_from_string(nz.at("mode").get<std::string>());
        const auto means = nz.at("means").get<std::vector<double>>();
        const auto stds = nz.at("stds").get<std::vector<double>>();
        if (means.size() != h.at("state_dim").get<std::size_t>() || stds.size() != means.size())
            throw FormatError("normalizer stats do not match state_dim", header_offset);
        m.normalizer.means = Eigen::Map<const RowVector>(means.data(), static_cast<Eigen::Index>(means.size()));
        m.normalizer.stds = Eigen::Map<const RowVector>(stds.data(), static_cast<Eigen::Index>(stds.size()));
        if (!h.at("identity_coder").get<bool>())
            m.coder = nn::Autoencoder{detail::mlp_from_header(h.at("encoder"), "encoder"),
                                      detail::mlp_from_header(h.at("decoder"), "decoder")};
        m.bank.dt = h.at("dt").get<double>();
        for (const auto& s : h.at("steppers"))
            m.bank.steppers.push_back(
                nn::ResNetStepper{detail::mlp_from_header(s, "stepper"), s.at("step").get<std::size_t>()});
        m.bank.latent_dim = m.bank.steppers.empty() ? 0 : m.bank.steppers.front().latent_dim();
        const auto& plan = h.at("plan");
        m.plan.active_indices = plan.at("active_indices").get<std::vector<std::size_t>>();
        m.plan.interpolant = hits::interpolant_from_string(plan.at("interpolant").get<std::string>());
        m.plan.horizon = plan.at("horizon").get<std::size_t>();
        out.metadata.seed = h.at("seed").get<std::uint64_t>();
        out.metadata.fingerprint = h.at("fingerprint").get<std::string>();
        out.metadata.config = h.at("config");
        blob_doubles = h.at("blob_doubles").get<std::size_t>();
        if (h.at("latent_dim").get<std::size_t>() != m.latent_dim())
            throw FormatError("latent_dim does not match coder dims", header_offset);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed model header: ") + e.what(), header_offset);
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw FormatError(std::string("invalid model header: ") + e.what(), header_offset);
    }

    std::size_t expected = 0;
    if (m.coder)
        expected += m.coder->encoder.parameter_count() + m.coder->decoder.parameter_count();
    for (const auto& s : m.bank.steppers)
        expected += s.body.parameter_count();
    const std::size_t blob_offset = in.offset();
    if (expected != blob_doubles)
        throw FormatError("header dims imply " + std::to_string(expected) + " weights but blob_doubles is " +
                              std::to_string(blob_doubles),
                          blob_offset);
    if (in.remaining() != expected * 8)
        throw FormatError("weight blob holds " + std::to_string(in.remaining()) + " bytes, header dims need " +
                              std::to_string(expected * 8),
                          blob_offset);
    if (m.coder) {
        detail::read_mlp(in, m.coder->encoder);
        detail::read_mlp(in, m.coder->decoder);
    }
    for (auto& s : m.bank.steppers)
        detail::read_mlp(in, s.body);
    try {
        m.validate();
    } catch (const Error& e) {
        throw FormatError(std::string("inconsistent model: ") + e.what(), header_offset);
    }
    return out;
}

inline void save_model(const std::filesystem::path& path, const LhitsModel& model, const ModelMetadata& meta = {})
{
    write_file_atomic(path, encode_model(model, meta));
}

inline LoadedModel load_model(const std::filesystem::path& path) { return decode_model(read_file(path)); }

} // namespace lhits::persist
