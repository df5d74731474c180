#pragma once

#include <vector>

#include "domord/orders.hpp"
#include "domord/util.hpp"

namespace domord {

struct Score {
    Rational value;       // pairs / C(m,2), or 0 when m < 2
    int m = 0;            // vertex count
    long long pairs = 0;  // connected vertex pairs
};

// Closeness of an acyclic order graph to a strong total order.
Score pairwise_score(const OrderGraph& g);

// Unweighted mean over groups of pairs(G_i) / C(m_total, 2).
Score conditional_score(const std::vector<OrderGraph>& group_orders, int m_total);

}  // namespace domord
