#pragma once

#include <Eigen/Dense>

#include "irspnc/rng.hpp"
#include "irspnc/types.hpp"

namespace irspnc {

/// Draws all channel matrices with i.i.d. CN(0,1) entries.
ChannelRealization gen_channels(const SystemParams& params, Rng& rng);

/// H = H_ir diag(v) H_ui + H_ur  (Nr x Ns).
CMat effective_channel(const ChannelRealization& ch, const PhaseProfile& v);

/// D = [[1,1],[1,-1]]; maps (x1,x2) to (x1+x2, x1-x2). D*D = 2*I.
Eigen::Matrix2d sum_difference_matrix();

/// r = H x + n, n_j i.i.d. CN(mu, sigma^2).
CVec relay_receive(const CMat& h, const CVec& x, const SystemParams& params, Rng& rng);

}  // namespace irspnc
