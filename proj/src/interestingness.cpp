#include "domord/interestingness.hpp"

namespace domord {

Score pairwise_score(const OrderGraph& g) {
    Score s;
    s.m = g.m();
    if (s.m < 2) return s;
    s.pairs = reachable_pair_count(g);
    long long denom = static_cast<long long>(s.m) * (s.m - 1) / 2;
    s.value = Rational(s.pairs, denom);
    return s;
}

Score conditional_score(const std::vector<OrderGraph>& group_orders, int m_total) {
    Score s;
    s.m = m_total;
    if (m_total < 2 || group_orders.empty()) return s;
    long long denom = static_cast<long long>(m_total) * (m_total - 1) / 2;
    Rational sum(0, 1);
    for (const OrderGraph& g : group_orders) {
        long long pairs = reachable_pair_count(g);
        s.pairs += pairs;
        sum = sum + Rational(pairs, denom);
    }
    s.value = sum / static_cast<long long>(group_orders.size());
    return s;
}

}  // namespace domord
