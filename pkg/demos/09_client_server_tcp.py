"""The delegation protocol over a real TCP socket.

The client prepares four single qubits, ships them (as simulated amplitude
payloads), and from then on sends only classical angle instructions; the
server entangles, measures on demand, and returns outcomes.  The transcript
is newline-delimited JSON and never contains theta, r, or phi.
"""
import numpy as np

from blindsim import Angle8, ClientSecrets, ClusterConfig, TcpServer, run_session_tcp
from blindsim.experiments import GROVER_TAG_ANGLES, grover_decode

server = TcpServer(("127.0.0.1", 0), seed=42)
server.start_background()
host, port = server.server_address
print(f"server listening on {host}:{port}")

phi2, phi3 = GROVER_TAG_ANGLES["10"]
phi = {1: Angle8(2), 4: Angle8(2), 2: phi2, 3: phi3}
rng = np.random.default_rng(5)
secrets = ClientSecrets.random(ClusterConfig.TRIANGLE, phi, rng)
print("client secrets: theta =",
      {q: a.eighths for q, a in secrets.phases.theta.items()},
      " r =", dict(secrets.r))

transcript, result = run_session_tcp(secrets, (host, port))
server.shutdown()
server.server_close()

print("\nwire transcript:")
for message in transcript.messages:
    line = message.canonical_json()
    print(" ", line if len(line) < 100 else line[:97] + "...")

print("\nraw outcomes:", result.outcomes)
print("client-side interpreted bits:", result.interpreted)
print("decoded Grover tag:", grover_decode(result.interpreted), "(expected 10)")
