import numpy as np
import pytest
import sympy as sy

from muskatlab.geometry import InterfacePair, PeriodicFn, constant_fn, from_callable, make_grid
from muskatlab.operators import (
    FluidParams,
    StripField,
    StripGrid,
    apply_operator,
    boundary_B1,
    boundary_B_minus,
    boundary_B_plus,
    coeffs_A_minus,
    coeffs_A_plus,
    frechet_A,
    frechet_B,
    map_phi_minus,
    map_phi_plus,
    strip_heights,
)

PAR = FluidParams()


def fn(grid, func):
    return from_callable(grid, func)


def plus_strip(grid, n_y=16):
    return StripGrid(grid, n_y, "plus")


def minus_strip(grid, n_y=16):
    return StripGrid(grid, n_y, "minus")


class TestMaps:
    def test_minus_bottom_maps_to_d(self):
        g = make_grid(16)
        f = constant_fn(g, 0.0)
        for d in (-1.0, -2.5):
            _, y_phys = map_phi_minus(f, d, (1.0, -1.0))
            assert abs(y_phys - d) < 1e-14

    def test_minus_top_maps_to_graph(self):
        g = make_grid(32)
        f = fn(g, lambda x: 0.3 * np.sin(x))
        x = np.array([0.0, 1.1, 4.0])
        _, y_phys = map_phi_minus(f, -1.0, (x, np.zeros(3)))
        assert np.max(np.abs(y_phys - 0.3 * np.sin(x))) < 1e-13

    def test_minus_formula_scalar(self):
        g = make_grid(32)
        f = fn(g, lambda x: 0.3 * np.sin(x))
        x, y, d = np.pi / 2, -0.5, -1.0
        _, y_phys = map_phi_minus(f, d, (x, y))
        assert abs(y_phys - (-d * y + (1 + y) * 0.3 * np.sin(x))) < 1e-13

    def test_plus_edges(self):
        g = make_grid(32)
        f = fn(g, lambda x: 0.1 * np.cos(x))
        h = fn(g, lambda x: 1.0 + 0.2 * np.sin(x))
        x = g.nodes[:5]
        _, y0 = map_phi_plus(f, h, (x, np.zeros(5)))
        _, y1 = map_phi_plus(f, h, (x, np.ones(5)))
        assert np.max(np.abs(y0 - f.values[:5])) < 1e-13
        assert np.max(np.abs(y1 - h.values[:5])) < 1e-13

    def test_plus_identity_for_unit_layer(self):
        g = make_grid(16)
        f, h = constant_fn(g, 0.0), constant_fn(g, 1.0)
        y = np.linspace(0, 1, 11)
        _, y_phys = map_phi_plus(f, h, (np.full(11, 2.0), y))
        assert np.max(np.abs(y_phys - y)) < 1e-14

    def test_out_of_range(self):
        g = make_grid(16)
        f, h = constant_fn(g, 0.0), constant_fn(g, 1.0)
        with pytest.raises(ValueError):
            map_phi_minus(f, -1.0, (0.0, 0.5))
        with pytest.raises(ValueError):
            map_phi_plus(f, h, (0.0, -0.1))


def chain_rule_coeffs_minus(f_expr, d, x_nodes, y_nodes):
    """Independent symbolic oracle: push the Laplacian through the inverse map.

    With q(x, Y) = (Y - f)/(f - d) the pullback satisfies
    Lap(v o inverse) o map = v_xx + 2 q_x v_xy + (q_x^2 + q_Y^2) v_yy + q_xx v_y,
    coefficients evaluated at Y = -d*y + (1+y) f.
    """
    x, y_s, big_y = sy.symbols("x y Y", real=True)
    q = (big_y - f_expr) / (f_expr - d)
    q_x = sy.diff(q, x)
    q_xx = sy.diff(q, x, 2)
    q_y = sy.diff(q, big_y)
    subs_y = -d * y_s + (1 + y_s) * f_expr
    exprs = [2 * q_x, q_x**2 + q_y**2, q_xx]
    funcs = [sy.lambdify((x, y_s), e.subs(big_y, subs_y), "numpy") for e in exprs]
    xx, yy = np.meshgrid(x_nodes, y_nodes, indexing="ij")
    return [np.asarray(fun(xx, yy), dtype=float) + np.zeros_like(xx) for fun in funcs]


def chain_rule_coeffs_plus(f_expr, h_expr, x_nodes, y_nodes):
    x, y_s, big_y = sy.symbols("x y Y", real=True)
    q = (big_y - f_expr) / (h_expr - f_expr)
    q_x = sy.diff(q, x)
    q_xx = sy.diff(q, x, 2)
    q_y = sy.diff(q, big_y)
    subs_y = y_s * h_expr + (1 - y_s) * f_expr
    exprs = [2 * q_x, q_x**2 + q_y**2, q_xx]
    funcs = [sy.lambdify((x, y_s), e.subs(big_y, subs_y), "numpy") for e in exprs]
    xx, yy = np.meshgrid(x_nodes, y_nodes, indexing="ij")
    return [np.asarray(fun(xx, yy), dtype=float) + np.zeros_like(xx) for fun in funcs]


class TestCoefficients:
    def test_flat_minus_is_laplacian(self):
        g = make_grid(16)
        c = coeffs_A_minus(constant_fn(g, 0.0), PAR, minus_strip(g))
        assert np.allclose(c.c_xx, 1.0) and np.allclose(c.c_yy, 1.0)
        assert np.max(np.abs(c.c_xy)) < 1e-14 and np.max(np.abs(c.c_y)) < 1e-14

    def test_constant_offset_minus(self):
        g = make_grid(16)
        cval, d = 0.5, -2.0
        par = FluidParams(d=d)
        c = coeffs_A_minus(constant_fn(g, cval), par, minus_strip(g))
        assert np.allclose(c.c_yy, 1.0 / (cval - d) ** 2)
        assert np.max(np.abs(c.c_xy)) < 1e-14 and np.max(np.abs(c.c_y)) < 1e-14

    def test_flat_plus_unit_gap(self):
        g = make_grid(16)
        c = coeffs_A_plus(constant_fn(g, 0.0), constant_fn(g, 1.0), PAR, plus_strip(g))
        assert np.allclose(c.c_xx, 1.0) and np.allclose(c.c_yy, 1.0)
        assert np.max(np.abs(c.c_xy)) < 1e-14

    def test_flat_plus_gap_two(self):
        g = make_grid(16)
        c = coeffs_A_plus(constant_fn(g, 0.0), constant_fn(g, 2.0), PAR, plus_strip(g))
        assert np.allclose(c.c_yy, 0.25)
        assert np.max(np.abs(c.c_xy)) < 1e-14

    def test_chain_rule_oracle_minus(self):
        g = make_grid(32)
        strip = minus_strip(g)
        x = sy.Symbol("x", real=True)
        c = coeffs_A_minus(fn(g, lambda t: 0.2 * np.sin(t)), PAR, strip)
        c_xy, c_yy, c_y = chain_rule_coeffs_minus(sy.Rational(1, 5) * sy.sin(x), -1.0,
                                                  g.nodes, strip.y_nodes)
        assert np.max(np.abs(c.c_xy - c_xy)) < 1e-10
        assert np.max(np.abs(c.c_yy - c_yy)) < 1e-10
        assert np.max(np.abs(c.c_y - c_y)) < 1e-10

    def test_chain_rule_oracle_plus(self):
        g = make_grid(32)
        strip = plus_strip(g)
        x = sy.Symbol("x", real=True)
        f = fn(g, lambda t: 0.2 * np.sin(t) - 0.1 * np.cos(2 * t))
        h = fn(g, lambda t: 1.0 + 0.15 * np.cos(t))
        c = coeffs_A_plus(f, h, PAR, strip)
        f_expr = sy.Rational(1, 5) * sy.sin(x) - sy.Rational(1, 10) * sy.cos(2 * x)
        h_expr = 1 + sy.Rational(3, 20) * sy.cos(x)
        c_xy, c_yy, c_y = chain_rule_coeffs_plus(f_expr, h_expr, g.nodes, strip.y_nodes)
        assert np.max(np.abs(c.c_xy - c_xy)) < 1e-10
        assert np.max(np.abs(c.c_yy - c_yy)) < 1e-10
        assert np.max(np.abs(c.c_y - c_y)) < 1e-10

    def test_ellipticity_random_interfaces(self):
        rng = np.random.default_rng(23)
        g = make_grid(32)
        for _ in range(10):
            f_vals = 0.2 * rng.uniform(-1, 1, 3)
            h_vals = 0.2 * rng.uniform(-1, 1, 2)
            f = fn(g, lambda t: f_vals[0] * np.sin(t) + f_vals[1] * np.cos(2 * t) + f_vals[2])
            h = fn(g, lambda t: 1.5 + h_vals[0] * np.sin(t) + h_vals[1] * np.cos(3 * t))
            cm = coeffs_A_minus(f, PAR, minus_strip(g))
            cp = coeffs_A_plus(f, h, PAR, plus_strip(g))
            for c in (cm, cp):
                assert np.all(4 * c.c_xx * c.c_yy - c.c_xy**2 > 0)

    def test_inadmissible_raises(self):
        g = make_grid(16)
        from muskatlab.geometry import AdmissibilityError
        with pytest.raises(AdmissibilityError):
            coeffs_A_minus(constant_fn(g, -2.0), PAR, minus_strip(g))
        with pytest.raises(AdmissibilityError):
            coeffs_A_plus(constant_fn(g, 1.0), constant_fn(g, 0.5), PAR, plus_strip(g))


class TestApplyOperator:
    def test_laplacian_on_fourier_mode(self):
        g = make_grid(64)
        strip = plus_strip(g, 16)
        c = coeffs_A_plus(constant_fn(g, 0.0), constant_fn(g, 1.0), PAR, strip)
        k = 3
        u = np.cos(k * g.nodes)[:, None] * (0.5 + 0.25 * strip.y_nodes)[None, :]
        out = apply_operator(c, StripField(strip, u)).values
        target = -k**2 * u
        # x-discretization error of the centered stencil, affine-in-y exact
        expected_err = abs(-(2 - 2 * np.cos(k * g.dx)) / g.dx**2 + k**2) * np.max(np.abs(u))
        assert np.max(np.abs(out - target)) < 1.2 * expected_err + 1e-12

    def test_constant_field_zero(self):
        g = make_grid(16)
        strip = minus_strip(g)
        f = fn(g, lambda t: 0.1 * np.sin(t))
        c = coeffs_A_minus(f, PAR, strip)
        out = apply_operator(c, StripField(strip, np.full(strip.shape, 4.2))).values
        assert np.max(np.abs(out)) < 1e-12

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_harmonic_pullback_second_order(self, m):
        errs = []
        for n in (16, 32, 64):
            g = make_grid(n)
            strip = StripGrid(g, n, "minus")
            f = fn(g, lambda t: 0.2 * np.sin(t))
            fh = InterfacePair(f, constant_fn(g, 1.0), -1.0)
            y_phys = strip_heights(fh, strip)
            u = np.exp(m * y_phys) * np.cos(m * g.nodes)[:, None]
            c = coeffs_A_minus(f, PAR, strip)
            errs.append(np.max(np.abs(apply_operator(c, StripField(strip, u)).values)))
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(rates - 2.0) < 0.3)

    def test_harmonic_pullback_plus_strip(self):
        errs = []
        for n in (16, 32, 64):
            g = make_grid(n)
            strip = StripGrid(g, n, "plus")
            f = fn(g, lambda t: 0.2 * np.sin(t))
            h = fn(g, lambda t: 1.0 + 0.1 * np.cos(t))
            fh = InterfacePair(f, h, -1.0)
            y_phys = strip_heights(fh, strip)
            u = np.exp(2 * y_phys) * np.sin(2 * g.nodes)[:, None]
            c = coeffs_A_plus(f, h, PAR, strip)
            errs.append(np.max(np.abs(apply_operator(c, StripField(strip, u)).values)))
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(rates - 2.0) < 0.3)


class TestBoundaryOperators:
    def test_minus_linear_field(self):
        g = make_grid(16)
        strip = minus_strip(g)
        f = constant_fn(g, 0.0)
        u = np.broadcast_to(strip.y_nodes + 1.0, strip.shape).copy()
        out = boundary_B_minus(f, PAR, StripField(strip, u)).values
        assert np.max(np.abs(out - PAR.k / PAR.mu_minus)) < 1e-12

    def test_constant_field_zero(self):
        g = make_grid(16)
        f = fn(g, lambda t: 0.2 * np.cos(t))
        strip = minus_strip(g)
        out = boundary_B_minus(f, PAR, StripField(strip, np.full(strip.shape, 2.0))).values
        assert np.max(np.abs(out)) < 1e-13

    def test_normal_derivative_identity_minus(self):
        # field = pullback of the physical height Y; B(f) Y = k/mu exactly
        g = make_grid(64)
        strip = minus_strip(g, 32)
        f = fn(g, lambda t: 0.3 * np.cos(t))
        fh = InterfacePair(f, constant_fn(g, 1.0), -1.0)
        u = strip_heights(fh, strip)
        out = boundary_B_minus(f, PAR, StripField(strip, u)).values
        assert np.max(np.abs(out - PAR.k / PAR.mu_minus)) < 1e-6

    def test_normal_derivative_identity_top(self):
        g = make_grid(64)
        strip = plus_strip(g, 32)
        f = constant_fn(g, 0.0)
        h = fn(g, lambda t: 1.0 + 0.2 * np.sin(t))
        fh = InterfacePair(f, h, -1.0)
        u = strip_heights(fh, strip)
        out = boundary_B1(f, h, PAR, StripField(strip, u)).values
        assert np.max(np.abs(out - PAR.k / PAR.mu_plus)) < 1e-6

    def test_plus_linear_field(self):
        g = make_grid(16)
        strip = plus_strip(g)
        f, h = constant_fn(g, 0.0), constant_fn(g, 1.0)
        u = np.broadcast_to(strip.y_nodes, strip.shape).copy()
        out_b = boundary_B_plus(f, h, PAR, StripField(strip, u)).values
        out_b1 = boundary_B1(f, h, PAR, StripField(strip, u)).values
        assert np.max(np.abs(out_b - PAR.k / PAR.mu_plus)) < 1e-12
        assert np.max(np.abs(out_b1 - PAR.k / PAR.mu_plus)) < 1e-12

    def test_harmonic_oracle_convergence(self):
        # co-normal trace of a pulled-back harmonic vs the analytic value
        m = 2
        errs = []
        for n in (16, 32, 64):
            g = make_grid(n)
            strip = StripGrid(g, n, "minus")
            f = fn(g, lambda t: 0.3 * np.cos(t))
            fh = InterfacePair(f, constant_fn(g, 1.0), -1.0)
            y_phys = strip_heights(fh, strip)
            u = np.exp(m * y_phys) * np.cos(m * g.nodes)[:, None]
            out = boundary_B_minus(f, PAR, StripField(strip, u)).values
            fp = 0.3 * -np.sin(g.nodes) * 0 - 0.3 * np.sin(g.nodes)
            exact = (PAR.k / PAR.mu_minus) * m * np.exp(m * f.values) * (
                fp * np.sin(m * g.nodes) + np.cos(m * g.nodes))
            errs.append(np.max(np.abs(out - exact)))
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(rates > 1.6)


def random_pair(grid, rng, scale=0.2):
    f = fn(grid, lambda t: scale * (np.sin(t) * rng.uniform(0.5, 1.0)
                                    + np.cos(2 * t) * rng.uniform(-0.5, 0.5)))
    h = fn(grid, lambda t: 1.2 + scale * np.cos(t) * rng.uniform(0.3, 1.0))
    return InterfacePair(f, h, -1.0)


def coeff_stack(c):
    return np.stack([c.c_xx, c.c_xy, c.c_yy, c.c_x, c.c_y, c.c_0])


class TestFrechetA:
    def test_zero_direction(self):
        g = make_grid(16)
        fh = random_pair(g, np.random.default_rng(1))
        for which, strip in (("minus_f", minus_strip(g)), ("plus_f", plus_strip(g)),
                             ("plus_h", plus_strip(g))):
            out = frechet_A(which, fh, constant_fn(g, 0.0), PAR, strip)
            assert np.max(np.abs(coeff_stack(out))) < 1e-14

    def test_flat_base_minus_f(self):
        g = make_grid(32)
        fh = InterfacePair(constant_fn(g, 0.0), constant_fn(g, 1.0), -1.0)
        direction = fn(g, lambda t: np.sin(2 * t))
        strip = minus_strip(g)
        out = frechet_A("minus_f", fh, direction, PAR, strip)
        y = strip.y_nodes[None, :]
        dp = 2 * np.cos(2 * g.nodes)[:, None]
        dpp = -4 * np.sin(2 * g.nodes)[:, None]
        dvals = np.sin(2 * g.nodes)[:, None]
        assert np.max(np.abs(out.c_xy - (-2 * (1 + y) * dp))) < 1e-12
        assert np.max(np.abs(out.c_yy - (-2 * dvals))) < 1e-12
        assert np.max(np.abs(out.c_y - (-(1 + y) * dpp))) < 1e-12
        assert np.max(np.abs(out.c_xx)) == 0.0

    @pytest.mark.parametrize("which,side", [("minus_f", "minus"), ("plus_f", "plus"),
                                            ("plus_h", "plus")])
    def test_finite_difference_oracle(self, which, side):
        g = make_grid(32)
        rng = np.random.default_rng(29)
        fh = random_pair(g, rng)
        direction = PeriodicFn(g, rng.standard_normal(g.n_x))
        strip = StripGrid(g, 16, side)
        lin = coeff_stack(frechet_A(which, fh, direction, PAR, strip))

        def coeffs_at(eps):
            if which == "minus_f":
                return coeff_stack(coeffs_A_minus(fh.f + eps * direction, PAR, strip))
            if which == "plus_f":
                return coeff_stack(coeffs_A_plus(fh.f + eps * direction, fh.h, PAR, strip))
            return coeff_stack(coeffs_A_plus(fh.f, fh.h + eps * direction, PAR, strip))

        base = coeffs_at(0.0)
        errs = []
        for eps in (1e-3, 5e-4, 2.5e-4):
            errs.append(np.max(np.abs((coeffs_at(eps) - base) / eps - lin)))
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(slopes - 1.0) < 0.2)

    def test_linear_in_direction(self):
        g = make_grid(32)
        rng = np.random.default_rng(31)
        fh = random_pair(g, rng)
        u = PeriodicFn(g, rng.standard_normal(g.n_x))
        v = PeriodicFn(g, rng.standard_normal(g.n_x))
        strip = plus_strip(g)
        lhs = coeff_stack(frechet_A("plus_f", fh, 1.5 * u - 0.5 * v, PAR, strip))
        rhs = (1.5 * coeff_stack(frechet_A("plus_f", fh, u, PAR, strip))
               - 0.5 * coeff_stack(frechet_A("plus_f", fh, v, PAR, strip)))
        assert np.max(np.abs(lhs - rhs)) < 1e-11


class TestFrechetB:
    def test_zero_direction(self):
        g = make_grid(16)
        rng = np.random.default_rng(2)
        fh = random_pair(g, rng)
        strip = minus_strip(g)
        field = StripField(strip, rng.standard_normal(strip.shape))
        out = frechet_B("B_minus_f", fh, constant_fn(g, 0.0), PAR, field)
        assert np.max(np.abs(out.values)) < 1e-14

    def test_plus_h_flat_base(self):
        g = make_grid(32)
        fh = InterfacePair(constant_fn(g, 0.0), constant_fn(g, 1.0), -1.0)
        direction = fn(g, lambda t: np.cos(t))
        strip = plus_strip(g)
        # field with unit dy at y = 0
        u = np.broadcast_to(strip.y_nodes, strip.shape).copy()
        out = frechet_B("B_plus_h", fh, direction, PAR, StripField(strip, u))
        target = -(PAR.k / PAR.mu_plus) * direction.values
        assert np.max(np.abs(out.values - target)) < 1e-12

    @pytest.mark.parametrize("which,side", [("B_minus_f", "minus"), ("B_plus_f", "plus"),
                                            ("B_plus_h", "plus"), ("B1_h", "plus")])
    def test_finite_difference_oracle(self, which, side):
        g = make_grid(32)
        rng = np.random.default_rng(37)
        fh = random_pair(g, rng)
        direction = PeriodicFn(g, rng.standard_normal(g.n_x))
        strip = StripGrid(g, 16, side)
        field = StripField(strip, rng.standard_normal(strip.shape))
        lin = frechet_B(which, fh, direction, PAR, field).values

        def boundary_at(eps):
            f = fh.f + eps * direction if which in ("B_minus_f", "B_plus_f") else fh.f
            h = fh.h + eps * direction if which in ("B_plus_h", "B1_h") else fh.h
            if which == "B_minus_f":
                return boundary_B_minus(f, PAR, field).values
            if which == "B_plus_f" or which == "B_plus_h":
                return boundary_B_plus(f, h, PAR, field).values
            return boundary_B1(f, h, PAR, field).values

        base = boundary_at(0.0)
        errs = []
        for eps in (1e-3, 5e-4, 2.5e-4):
            errs.append(np.max(np.abs((boundary_at(eps) - base) / eps - lin)))
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(slopes - 1.0) < 0.2)
