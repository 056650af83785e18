#ifndef HHG_NUMERICS_HPP
#define HHG_NUMERICS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace hhg {

// Fixed-order pairwise summation. The split points depend only on the
// length, so the result is reproducible bit for bit.
inline double pairwise_sum(std::span<double const> x) {
	constexpr std::size_t leaf = 16;
	if (x.size() <= leaf) {
		double s = 0.0;
		for (double v : x) s += v;
		return s;
	}
	auto const half = x.size() / 2;
	return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

// Classic fixed-step fourth-order Runge-Kutta for y' = f(y, t).
// System signature: void(std::span<T const> y, std::span<T> dydt, double t).
template <typename T>
class rk4_stepper {
public:
	explicit rk4_stepper(std::size_t n) : tmp_(n), k1_(n), k2_(n), k3_(n), k4_(n) {}

	template <typename System>
	void step(System&& system, std::span<T> y, double t, double dt) {
		auto const n = y.size();
		double const half = 0.5 * dt;

		system(std::span<T const>(y), std::span<T>(k1_), t);
		for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k1_[i];

		system(std::span<T const>(tmp_), std::span<T>(k2_), t + half);
		for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k2_[i];

		system(std::span<T const>(tmp_), std::span<T>(k3_), t + half);
		for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];

		system(std::span<T const>(tmp_), std::span<T>(k4_), t + dt);
		double const sixth = dt / 6.0;
		double const third = dt / 3.0;
		for (std::size_t i = 0; i < n; ++i)
			y[i] += sixth * (k1_[i] + k4_[i]) + third * (k2_[i] + k3_[i]);
	}

	std::size_t size() const { return tmp_.size(); }

private:
	std::vector<T> tmp_, k1_, k2_, k3_, k4_;
};

} // namespace hhg

#endif
