#pragma once

#include "asyncrev/core/parameter.hpp"

namespace asyncrev {

// logits = tanh(enc W_enc + pred W_pred + b) W_out + b_out; index 0 is blank.
template <typename T>
struct JointParams {
  Parameter<T> w_enc;   // [enc_dim x joint]
  Parameter<T> w_pred;  // [units x joint]
  Parameter<T> bias;    // [1 x joint]
  Parameter<T> w_out;   // [joint x vocab+1]
  Parameter<T> b_out;   // [1 x vocab+1]
};

// enc_t [1 x enc_dim], pred_u [1 x units] -> [1 x vocab+1].
template <typename T>
BasicTensor<T> joint(const BasicTensor<T>& enc_t, const BasicTensor<T>& pred_u,
                     const JointParams<T>& params);

template <typename T>
struct JointLatticeCache {
  BasicTensor<T> enc;     // [T' x enc_dim]
  BasicTensor<T> pred;    // [U+1 x units]
  BasicTensor<T> hidden;  // [T'(U+1) x joint], post-tanh
};

// Logits for every (t, u): shape [T' x (U+1) x (vocab+1)].
template <typename T>
BasicTensor<T> joint_lattice(const BasicTensor<T>& enc, const BasicTensor<T>& pred,
                             const JointParams<T>& params,
                             JointLatticeCache<T>* cache = nullptr);

// Accumulates parameter grads; writes d(enc) and d(pred).
template <typename T>
void joint_lattice_backward(JointParams<T>& params, const JointLatticeCache<T>& cache,
                            const BasicTensor<T>& d_logits, BasicTensor<T>& d_enc,
                            BasicTensor<T>& d_pred);

}  // namespace asyncrev
