// Copyright 2026 The masr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "masr/ctc.hpp"
#include "masr/eval.hpp"
#include "masr/lexicon.hpp"
#include "masr/matrix.hpp"
#include "masr/psd.hpp"

namespace py = pybind11;
using namespace masr;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  Matrix m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::memcpy(m.data.data(), a.data(), m.data.size() * sizeof(double));
  return m;
}

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> a({m.rows, m.cols});
  std::memcpy(a.mutable_data(), m.data.data(), m.data.size() * sizeof(double));
  return a;
}

}  // namespace

PYBIND11_MODULE(pymasr, m) {
  m.doc() = "numeric core of the modular speech recognizer";

  m.def(
      "log_softmax",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        return to_numpy(log_softmax(to_matrix(x)));
      },
      py::arg("x"), "row-wise log-softmax with max subtraction");

  m.def(
      "merge_beta",
      [](const LabelSeq& alignment, int32_t blank) { return merge_beta(alignment, blank); },
      py::arg("alignment"), py::arg("blank") = 0,
      "collapse consecutive repeats, then delete blanks");

  m.def(
      "ctc_loss",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& logpost,
         const LabelSeq& target, int32_t blank) {
        return ctc_loss(to_matrix(logpost), target, blank);
      },
      py::arg("logpost"), py::arg("target"), py::arg("blank") = 0,
      "negative log-likelihood over all alignments merging to the target");

  m.def(
      "ctc_loss_bruteforce",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& logpost,
         const LabelSeq& target, int32_t blank) {
        return ctc_loss_bruteforce(to_matrix(logpost), target, blank);
      },
      py::arg("logpost"), py::arg("target"), py::arg("blank") = 0,
      "exhaustive-enumeration oracle for ctc_loss");

  m.def(
      "ctc_grad",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& logpost,
         const LabelSeq& target, int32_t blank) {
        return to_numpy(ctc_grad(to_matrix(logpost), target, blank));
      },
      py::arg("logpost"), py::arg("target"), py::arg("blank") = 0,
      "gradient of ctc_loss with respect to pre-softmax logits");

  m.def(
      "greedy_decode",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& logpost,
         int32_t blank) { return greedy_decode(to_matrix(logpost), blank); },
      py::arg("logpost"), py::arg("blank") = 0, "best-path decode");

  m.def(
      "one_hot_posteriors",
      [](const LabelSeq& labels, int32_t vocab_size) {
        return to_numpy(one_hot_posteriors(labels, vocab_size));
      },
      py::arg("labels"), py::arg("vocab_size"),
      "log-domain one-hot posterior rows (0 hot, -inf elsewhere)");

  m.def(
      "psd_margin",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& logpost,
         int frame, int32_t blank) { return psd_margin(to_matrix(logpost), frame, blank); },
      py::arg("logpost"), py::arg("frame"), py::arg("blank") = 0,
      "blank-dominance margin of one frame, in nats");

  m.def(
      "psd_downsample",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& logpost,
         double lambda, int min_keep, int32_t blank) {
        auto [rows, idx] = psd_downsample(to_matrix(logpost), {lambda, min_keep}, blank);
        return py::make_tuple(to_numpy(rows), idx);
      },
      py::arg("logpost"), py::arg("lambda_"), py::arg("min_keep") = 1, py::arg("blank") = 0,
      "drop blank-dominated frames; returns (kept rows, kept indices)");

  m.def(
      "edit_distance",
      [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
        const EditCounts c = edit_distance(ref, hyp);
        return py::make_tuple(c.sub, c.ins, c.del);
      },
      py::arg("ref"), py::arg("hyp"), "(substitutions, insertions, deletions)");
}
