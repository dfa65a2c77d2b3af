"""
Abstract class FieldSimulator, for the time-domain oracle module.

All field simulators are derived classes of this abstract class, and at a
minimum implement a method called `simulate`.
"""
import abc

from fracpme.data import PdeField


class FieldSimulator(abc.ABC):
    """
    FieldSimulator is an abstract class that all field simulators derive from.

    A FieldSimulator time-steps an evolution equation on a bounded interval
    and returns the whole space-time history as a PdeField. It is used to
    cross-check self-similar profiles against the equation they reduce.
    """

    @abc.abstractmethod
    def simulate(self) -> PdeField:
        """
        Simulate a PdeField.

        The returned field holds every time level, the initial one included.
        """
