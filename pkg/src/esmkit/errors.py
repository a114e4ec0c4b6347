"""Shared exception types.

Domain code raises these; the HTTP layer maps them onto status codes
(401 auth, 404 unknown id, 409 illegal state transition or conflict,
422 schema or vocabulary violation).
"""

from __future__ import annotations

from typing import Any


class EsmkitError(Exception):
    """Base class for all domain errors."""

    status_code = 400

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_doc(self) -> dict:
        doc = {"error": type(self).__name__, "message": self.message}
        if self.details:
            doc["details"] = self.details
        return doc


class AuthError(EsmkitError):
    status_code = 401


class NotFoundError(EsmkitError):
    status_code = 404


class ConflictError(EsmkitError):
    status_code = 409


class IllegalTransitionError(ConflictError):
    pass


class ReplanRejected(ConflictError):
    pass


class VocabularyError(EsmkitError):
    status_code = 422


class SchemaError(EsmkitError):
    status_code = 422


class StoreError(EsmkitError):
    status_code = 500
