from traitlets import Unicode

from ..errors import BranchDomainDuringIteration, InvalidParameter, VerificationFailed
from ..identity import positivity_check
from ..kneading import parse_word
from ..model import PowerLawMap
from ..schemas import RunConfig, Subcommand
from ..thurston import locate_word_parameter, orbit_vector, sign_pattern, thurston_fixed_point
from .base import BaseCommand


class SuperstableCommand(BaseCommand):
    name = Unicode("kneadlab-superstable")

    description = "Superstable parameter of a kneading word from bisection and from the Thurston map."

    subcommand = Subcommand.SUPERSTABLE

    def run(self, config: RunConfig) -> int:
        try:
            word = parse_word(config.word)
        except ValueError as e:
            raise InvalidParameter(str(e))
        if not word.terminated_at_c:
            raise InvalidParameter(f"a superstable word ends in C, got {word}")

        a_bisect = locate_word_parameter(config.r, word)
        sigma = sign_pattern(word)
        try:
            fixed = thurston_fixed_point(sigma, config.r, tol=config.tol)
        except BranchDomainDuringIteration as e:
            self.log.warning("%s; restarting from the bisection orbit", e)
            start = orbit_vector(PowerLawMap(a=a_bisect, r=config.r), len(word))
            fixed = thurston_fixed_point(sigma, config.r, init=start, tol=config.tol)

        det, spec_rad, ok = positivity_check(config.r, a_bisect, len(word), seed=config.seed)
        print(f"word            {word}")
        print(f"a* (bisection)  {a_bisect:.12f}")
        print(f"a* (thurston)   {fixed.parameter:.12f}  [{fixed.method}, {fixed.iterations} iterations]")
        print(f"difference      {abs(fixed.parameter - a_bisect):.3e}")
        print(f"det(I - DT)     {det:.6f}")
        print(f"spectral radius {spec_rad:.6f}")
        print(f"positivity      {'OK' if ok else 'FAIL'}")
        if not ok:
            raise VerificationFailed(
                f"positivity fails for {word} at r={config.r!r}: det={det:.3g}, spectral radius={spec_rad:.3g}"
            )
        return 0
