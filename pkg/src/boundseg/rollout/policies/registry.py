"""Registry that maps policy names to policy classes."""

from boundseg.rollout.policies.base import Policy
from boundseg.rollout.policies.noisy_oracle import NoisyOraclePolicy
from boundseg.rollout.policies.replay import ReplayPolicy
from boundseg.rollout.policies.static import StaticPolicy


class PolicyRegistry:
    """Routes CLI policy names to policy classes."""

    def __init__(self) -> None:
        self._policies: dict[str, type[Policy]] = {}
        # Register built-in policies
        self.register("noisy-oracle", NoisyOraclePolicy)
        self.register("replay", ReplayPolicy)
        self.register("static", StaticPolicy)

    def register(self, name: str, policy_cls: type[Policy]) -> None:
        """Register a policy class under a name."""
        self._policies[name.lower()] = policy_cls

    def get(self, name: str) -> type[Policy] | None:
        """Return the policy class for this name, or None."""
        return self._policies.get(name.lower())

    @property
    def names(self) -> list[str]:
        return sorted(self._policies)
