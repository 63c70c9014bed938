#include "data/batches.hpp"

#include <algorithm>
#include <cstring>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace deynet::data {

namespace {

struct SliceRef {
  const Volume* vol;
  std::int64_t z;
};

std::vector<SliceRef> collect_slices(const std::vector<Volume>& volumes) {
  std::vector<SliceRef> out;
  for (const auto& v : volumes)
    for (std::int64_t z = 0; z < v.slices(); ++z) out.push_back({&v, z});
  return out;
}

void check_uniform_shape(const std::vector<SliceRef>& refs) {
  for (const auto& r : refs)
    if (r.vol->height() != refs[0].vol->height() || r.vol->width() != refs[0].vol->width())
      fail(ErrorKind::Shape, "all volumes in a batch stream must share slice dimensions");
}

void append_slice(SliceBatch& b, const SliceRef& r, bool with_label) {
  const std::int64_t ss = r.vol->slice_size();
  const std::size_t off = b.images.size();
  b.images.resize(off + static_cast<std::size_t>(ss));
  std::memcpy(b.images.data() + off, r.vol->slice(r.z), static_cast<std::size_t>(ss) * sizeof(double));
  if (with_label) {
    if (!r.vol->label)
      fail(ErrorKind::Data, "volume " + r.vol->id + " is in the labeled set but has no label");
    b.labels.emplace_back(r.vol->label_slice(r.z), r.vol->label_slice(r.z) + ss);
  } else {
    b.labels.emplace_back();
  }
  b.labeled_flags.push_back(with_label ? 1 : 0);
  b.source_ids.emplace_back(r.vol->id, r.z);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

std::int64_t count_slices(const std::vector<Volume>& volumes) {
  std::int64_t n = 0;
  for (const auto& v : volumes) n += v.slices();
  return n;
}

std::vector<SliceBatch> make_joint_batches(const std::vector<Volume>& labeled,
                                           const std::vector<Volume>& unlabeled,
                                           std::int64_t batch_size, std::uint64_t seed) {
  if (batch_size < 2 || batch_size % 2 != 0)
    fail(ErrorKind::Param, "joint batch_size must be even and >= 2");
  if (labeled.empty()) fail(ErrorKind::Data, "labeled volume set is empty");
  if (unlabeled.empty()) fail(ErrorKind::Data, "unlabeled volume set is empty");

  auto lab_refs = collect_slices(labeled);
  auto unl_refs = collect_slices(unlabeled);
  check_uniform_shape(lab_refs);
  check_uniform_shape(unl_refs);
  if (lab_refs[0].vol->height() != unl_refs[0].vol->height() ||
      lab_refs[0].vol->width() != unl_refs[0].vol->width())
    fail(ErrorKind::Shape, "labeled and unlabeled volumes must share slice dimensions");

  Rng rng(seed);
  std::vector<std::size_t> order(lab_refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);

  const std::int64_t half = batch_size / 2;
  std::vector<SliceBatch> batches;
  std::size_t pos = 0;
  while (pos < order.size()) {
    const std::int64_t take = std::min<std::int64_t>(half, static_cast<std::int64_t>(order.size() - pos));
    SliceBatch b;
    b.height = lab_refs[0].vol->height();
    b.width = lab_refs[0].vol->width();
    for (std::int64_t i = 0; i < take; ++i) append_slice(b, lab_refs[order[pos + i]], true);
    for (std::int64_t i = 0; i < take; ++i)
      append_slice(b, unl_refs[rng.below(unl_refs.size())], false);
    pos += static_cast<std::size_t>(take);
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<SliceBatch> make_plain_batches(const std::vector<Volume>& volumes,
                                           std::int64_t batch_size, std::uint64_t seed) {
  if (batch_size < 1) fail(ErrorKind::Param, "batch_size must be >= 1");
  if (volumes.empty()) fail(ErrorKind::Data, "volume set is empty");

  auto refs = collect_slices(volumes);
  check_uniform_shape(refs);

  Rng rng(seed);
  std::vector<std::size_t> order(refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);

  std::vector<SliceBatch> batches;
  std::size_t pos = 0;
  while (pos < order.size()) {
    const std::int64_t take =
        std::min<std::int64_t>(batch_size, static_cast<std::int64_t>(order.size() - pos));
    SliceBatch b;
    b.height = refs[0].vol->height();
    b.width = refs[0].vol->width();
    for (std::int64_t i = 0; i < take; ++i) append_slice(b, refs[order[pos + i]], false);
    pos += static_cast<std::size_t>(take);
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace deynet::data
