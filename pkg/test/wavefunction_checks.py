#!/usr/bin/env python3
"""
PyATS Script to Check the Bound-State Profiles
Continuity at the origin, normalization, massless mirror symmetry and the
defect metric away from eigenvalues
"""

import logging
from dataclasses import replace
from unittest import mock

import numpy as np
from pyats import aetest
from pyats.log.utils import banner

from dirac1d.config import load_settings
from dirac1d.errors import DegenerateMatch, NotAnEigenvalue, TailTruncation
from dirac1d.spectral import PhysicalParams, eigenvalues
from dirac1d.wavefunction import assemble, assemble_at, continuity_defect, default_x_max, norm

logger = logging.getLogger(__name__)

ALPHAS = [0.0, 1.0, 2.0]


class CommonSetup(aetest.CommonSetup):
    """Common setup tasks"""

    @aetest.subsection
    def compute_levels(self, config=None):
        """Five lowest levels for each alpha"""

        logger.info(banner("Computing Levels"))

        settings = load_settings(config)
        levels = {}
        for alpha in ALPHAS:
            params = PhysicalParams.from_alpha(alpha)
            levels[alpha] = (params, eigenvalues(params, 5, settings.spectral, settings.series))
            logger.info(f"  alpha={alpha:g}: {[round(r.nu, 6) for r in levels[alpha][1]]}")

        self.parent.parameters['settings'] = settings
        self.parent.parameters['levels'] = levels


class EigenstateQuality(aetest.Testcase):
    """Profiles at refined eigenroots"""

    @aetest.setup
    def setup(self):
        self.settings = self.parent.parameters['settings']
        self.levels = self.parent.parameters['levels']

    def _assemble(self, record, params, **kwargs):
        return assemble(record, params, settings=self.settings.wavefunction,
                        cfg=self.settings.series,
                        residual_tol=self.settings.spectral.residual_tol, **kwargs)

    @aetest.test
    def continuity_and_norm(self):
        for alpha, (params, records) in self.levels.items():
            for record in records:
                for e_sign in (1, -1):
                    profile = self._assemble(record, params, e_sign=e_sign)
                    logger.info(
                        f"  alpha={alpha:g} n={record.index} E={profile.energy:+.6f}: "
                        f"defect={profile.continuity_defect:.2e}, norm={profile.norm:.9f}"
                    )
                    if profile.continuity_defect >= 1e-8:
                        self.failed(f"Continuity defect {profile.continuity_defect:.2e}")
                    if abs(profile.norm - 1.0) > self.settings.wavefunction.norm_tol:
                        self.failed(f"Norm {profile.norm} outside 1 +- {self.settings.wavefunction.norm_tol}")
                    if continuity_defect(profile) != profile.continuity_defect:
                        self.failed("Stored defect must match continuity_defect()")
                    if not profile.c_right > 0:
                        self.failed("Right-half coefficient must be positive")

    @aetest.test
    def grid_layout(self):
        params, records = self.levels[0.0]
        profile = self._assemble(records[0], params, n_points=201)
        if len(profile.x) != 202 or profile.x[profile.origin] != 0.0 or profile.x[profile.origin + 1] != 0.0:
            self.failed("The grid must hold the origin once per half-line")
        if abs(profile.x_max - default_x_max(records[0].nu, params)) > 1e-12:
            self.failed("Default half-width must follow the tail rule")
        if len(profile.rows()) != len(profile.x) or len(profile.rows()[0]) != 3:
            self.failed("rows() must yield (x, psi1, psi2) per sample")

    @aetest.test
    def massless_mirror_symmetry(self):
        """(psi1, psi2)(x) = s (psi2, psi1)(-x) at m = 0, s = sign(C'/C)"""

        params, records = self.levels[0.0]
        for record in records:
            profile = self._assemble(record, params)
            s = profile.mirror_sign
            left, right = profile.left(), profile.right()
            worst = max(
                np.max(np.abs(profile.psi1[left][::-1] - s * profile.psi2[right])),
                np.max(np.abs(profile.psi2[left][::-1] - s * profile.psi1[right])),
            )
            logger.info(f"  n={record.index}: mirror sign {s:+d}, deviation {worst:.2e}")
            if worst > 1e-10:
                self.failed(f"Mirror symmetry broken by {worst:.2e} at level {record.index}")

    @aetest.test
    def grid_convergence(self):
        """Normalization constant stable under grid doubling"""

        for alpha, (params, records) in self.levels.items():
            for record in records[:3]:
                coarse = self._assemble(record, params, n_points=2001)
                fine = self._assemble(record, params, n_points=4001)
                shift = abs(fine.c_right - coarse.c_right) / fine.c_right
                if shift >= 1e-7:
                    self.failed(f"alpha={alpha:g} n={record.index}: normalization shifts by {shift:.2e}")
                if abs(fine.norm - coarse.norm) >= 1e-7:
                    self.failed(f"alpha={alpha:g} n={record.index}: norm shifts under grid doubling")
                if abs(fine.continuity_defect - coarse.continuity_defect) >= 1e-7:
                    self.failed(f"alpha={alpha:g} n={record.index}: defect shifts under grid doubling")


class DefectDiscrimination(aetest.Testcase):
    """The continuity defect separates eigenvalues from nearby orders"""

    @aetest.setup
    def setup(self):
        self.settings = self.parent.parameters['settings']
        self.levels = self.parent.parameters['levels']

    @aetest.test
    def displaced_orders(self):
        for alpha, (params, records) in self.levels.items():
            for record in records:
                for shift in (-0.05, 0.05):
                    profile = assemble_at(record.nu + shift, params,
                                          settings=self.settings.wavefunction, cfg=self.settings.series)
                    if profile.continuity_defect <= 1e-4:
                        self.failed(
                            f"alpha={alpha:g} n={record.index}: defect {profile.continuity_defect:.2e} "
                            f"at nu{shift:+.2f}"
                        )
        logger.info("  ✓ Defect above 1e-4 at every nu +- 0.05")

    @aetest.test
    def midpoints(self):
        params, records = self.levels[1.0]
        nu = 0.5 * (records[0].nu + records[1].nu)
        profile = assemble_at(nu, params, settings=self.settings.wavefunction, cfg=self.settings.series)
        logger.info(f"  alpha=1 midpoint nu={nu:.6f}: defect {profile.continuity_defect:.2e}")
        if profile.continuity_defect <= 1e-3:
            self.failed("Midpoint between levels must show a large defect")

        params, records = self.levels[0.0]
        profile = assemble_at(records[0].nu + 0.1, params,
                              settings=self.settings.wavefunction, cfg=self.settings.series)
        if profile.continuity_defect <= 1e-3:
            self.failed("nu_0 + 0.1 at alpha=0 must show a large defect")

    @aetest.test
    def residual_gate(self):
        params, records = self.levels[0.0]
        off = replace(records[0], relative_residual=1.0, residual=1.0)
        try:
            assemble(off, params, settings=self.settings.wavefunction, cfg=self.settings.series,
                     residual_tol=self.settings.spectral.residual_tol)
        except NotAnEigenvalue as e:
            logger.info(f"  ✓ NotAnEigenvalue: {e}")
        else:
            self.failed("A record above the residual tolerance must be rejected")

    @aetest.test
    def truncated_grid(self):
        params, records = self.levels[0.0]
        try:
            assemble(records[0], params, x_max=1.0, settings=self.settings.wavefunction,
                     cfg=self.settings.series, residual_tol=self.settings.spectral.residual_tol)
        except TailTruncation as e:
            logger.info(f"  ✓ TailTruncation: {e}")
        else:
            self.failed("A grid narrower than the envelope must be rejected")

        profile = assemble(records[0], params, settings=self.settings.wavefunction,
                           cfg=self.settings.series, residual_tol=self.settings.spectral.residual_tol)
        if not norm(profile) > 0:
            self.failed("Norm of the ground state must be positive")

    @aetest.test
    def degenerate_match(self):
        """Both envelopes vanishing at the origin leave no matching constant"""

        params, records = self.levels[1.0]
        with mock.patch('dirac1d.wavefunction.hermite_envelope',
                        lambda nu, xi, cfg=None: np.zeros_like(xi)):
            try:
                assemble_at(records[0].nu, params, settings=self.settings.wavefunction,
                            cfg=self.settings.series)
            except DegenerateMatch as e:
                logger.info(f"  ✓ DegenerateMatch: {e}")
            else:
                self.failed("Vanishing H_nu and H_nu-1 at alpha must raise DegenerateMatch")

    @aetest.test
    def invalid_inputs(self):
        params, records = self.levels[0.0]
        for kwargs in ({'e_sign': 0}, {'n_points': 2000}, {'n_points': 1}, {'x_max': -1.0}):
            try:
                assemble_at(records[0].nu, params, settings=self.settings.wavefunction,
                            cfg=self.settings.series, **kwargs)
            except ValueError:
                continue
            self.failed(f"assemble_at accepted {kwargs}")


class CommonCleanup(aetest.CommonCleanup):
    """Common cleanup tasks"""

    @aetest.subsection
    def summary(self):
        logger.info(banner("Wavefunction Checks Complete"))


if __name__ == '__main__':
    import argparse

    parser = argparse.ArgumentParser(description='Bound-state profile checks')
    parser.add_argument('--config', default=None, help='Settings YAML (default: packaged)')
    args, unknown = parser.parse_known_args()

    aetest.main(config=args.config)
