#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "net/layers.hpp"

namespace deynet::net {

enum class Upsample { Transposed, Bilinear };

struct Arch {
  int depth = 4;
  int base_channels = 32;
  int in_channels = 1;
  Upsample upsample = Upsample::Transposed;

  std::int64_t channels_at(int level) const {
    return std::int64_t(base_channels) << level;
  }
};

enum class Group { Encoder, SegDecoder, DenDecoder, EncoderBnAffine, All };
Group parse_group(const std::string& name);
std::string group_name(Group g);

// conv -> BN -> ReLU, twice
struct DoubleConv {
  Conv2d conv1, conv2;
  BatchNorm2d bn1, bn2;

  struct Cache {
    Conv2d::Cache c1, c2;
    BatchNorm2d::Cache b1, b2;
    Relu::Cache r1, r2;
  };

  void build(std::int64_t in_c, std::int64_t out_c, const std::string& prefix);
  void init(Rng& rng);
  void collect(std::vector<Param*>& out);
  void state_tensors(std::vector<std::pair<std::string, Tensor*>>& out);

  void forward(const Tensor& x, Tensor& y, Cache& cache, Mode mode, Scratch& scratch);
  void backward(const Tensor& gy, const Cache& cache, Tensor* gx, Scratch& scratch);
};

// U-Net down path: `depth` resolution levels with channel doubling, 2x2 max
// pooling between levels. Level outputs feed the decoders' skip connections.
struct Encoder {
  Arch arch;
  std::vector<DoubleConv> levels;

  struct Cache {
    std::vector<DoubleConv::Cache> dc;
    std::vector<MaxPool2x2::Cache> pool;
    std::vector<Tensor> level_out;  // [depth]; last entry is the bottom feature map
  };

  void build(const Arch& a);
  void init(Rng& rng);
  void collect(std::vector<Param*>& out);
  void state_tensors(std::vector<std::pair<std::string, Tensor*>>& out);

  void forward(const Tensor& x, Cache& cache, Mode mode, Scratch& scratch);
  // gskips[i] pairs with level_out[i] for i < depth-1; gbottom with the last.
  void backward(const Tensor& gbottom, const std::vector<Tensor>& gskips, const Cache& cache,
                Scratch& scratch);
};

// U-Net up path with skip connections and a 1-channel 1x1 head. Structure is
// identical for the segmentation and denoising roles; only parameters differ.
struct Decoder {
  Arch arch;

  struct UpBlock {
    ConvTranspose2x2 upconv;  // transposed mode
    Conv2d upsample_conv;     // bilinear mode
    BatchNorm2d bn;
    DoubleConv dc;
  };
  std::vector<UpBlock> ups;  // from bottom toward full resolution
  Conv2d head;

  struct UpCache {
    ConvTranspose2x2::Cache up;
    Upsample2x::Cache bilinear;
    Conv2d::Cache upsample_conv;
    BatchNorm2d::Cache bn;
    Relu::Cache relu;
    DoubleConv::Cache dc;
    std::int64_t up_channels = 0;
  };
  struct Cache {
    std::vector<UpCache> ups;
    Conv2d::Cache head;
  };

  void build(const Arch& a, const std::string& prefix);
  void init(Rng& rng);
  void collect(std::vector<Param*>& out);
  void state_tensors(std::vector<std::pair<std::string, Tensor*>>& out);

  Tensor forward(const Tensor& bottom, const std::vector<Tensor>& skips, Cache& cache, Mode mode,
                 Scratch& scratch);
  // Accumulates into gbottom / gskips (all must be pre-sized and zeroed or
  // already holding another decoder's contribution).
  void backward(const Tensor& gout, const Cache& cache, Tensor& gbottom,
                std::vector<Tensor>& gskips, Scratch& scratch);
};

// Plain single-decoder U-Net used for denoiser pretraining.
struct UNet {
  Arch arch;
  Encoder encoder;
  Decoder decoder;

  struct Cache {
    Encoder::Cache enc;
    Decoder::Cache dec;
    long encoder_passes = 0;
  };

  void collect(std::vector<Param*>& out);
  std::vector<std::pair<std::string, Tensor*>> named_state();

  Tensor forward(const Tensor& x, Cache& cache, Mode mode, Scratch& scratch);
  void backward(const Tensor& gout, const Cache& cache, Scratch& scratch);
  void zero_grads();
};

UNet build_unet(const Arch& arch, std::uint64_t seed);

// The Y-shaped model: one encoder, two structurally identical decoders.
struct DeYNet {
  Arch arch;
  Encoder encoder;
  Decoder seg_decoder;
  Decoder den_decoder;

  struct Cache {
    Encoder::Cache enc;
    Decoder::Cache seg;
    Decoder::Cache den;
    long encoder_passes = 0;
  };
  struct Output {
    Tensor seg_logits;  // (1, B, H, W)
    Tensor denoised;    // (1, B, H, W)
  };

  std::vector<Param*> params(Group g);
  std::vector<std::pair<std::string, Tensor*>> named_state();

  // One encoder pass feeds both heads.
  Output forward(const Tensor& x, Cache& cache, Mode mode, Scratch& scratch);
  // Pass gden = nullptr to skip the denoising branch; its gradients are
  // exactly zero in that case.
  void backward(const Tensor* gseg, const Tensor* gden, const Cache& cache, Scratch& scratch);
  void zero_grads();
};

DeYNet build_deynet(const Arch& arch, std::uint64_t seed);

// Bitwise copy of parameter values; shapes must match pairwise.
void copy_params(const std::vector<Param*>& src, const std::vector<Param*>& dst);

// Copies parameters and normalization statistics of one component onto a
// structurally identical one (encoder->encoder or decoder->decoder).
void copy_component(Encoder& src, Encoder& dst);
void copy_component(Decoder& src, Decoder& dst);

}  // namespace deynet::net
