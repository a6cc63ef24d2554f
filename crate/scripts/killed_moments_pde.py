"""Crank-Nicolson oracle for E_r[1/ln R(t)] and E_r[R(t)^2].

R is planar Brownian motion killed on the unit circle, h-transformed by
h = ln r, so E_r[f(R_t)] = E_r[f(W_t) ln|W_t|; t < tau] / ln r. Both
expectations solve the radial heat equation w_t = w_rr/2 + w_r/(2r) on
(1, R) with w(1, t) = 0; the far boundary uses the free-space value.
"""
import numpy as np, scipy.sparse as sp, scipy.sparse.linalg as spl
def solve(w0, far, R=16.0, N=24000, T=1.0, M=4000, r0=2.0):
    r=np.linspace(1,R,N+1); h=r[1]-r[0]; ri=r[1:-1]
    a=0.5/h**2 - 0.25/(ri*h); c=0.5/h**2+0.25/(ri*h); b=-1.0/h**2*np.ones_like(ri)
    L=sp.diags([a[1:],b,c[:-1]],[-1,0,1],format='csc')
    dt=T/M; I=sp.identity(len(ri),format='csc')
    A=(I-0.5*dt*L).tocsc(); B=(I+0.5*dt*L).tocsc(); lu=spl.splu(A)
    w=w0(ri).astype(float)
    # Rannacher start: few implicit Euler substeps to damp the boundary kink
    lu_ie=spl.splu((I-0.25*dt*L).tocsc())
    t=0.0
    for k in range(4):
        rhs=w.copy(); rhs[-1]+=0.25*dt*c[-1]*far(R,t+0.25*dt); w=lu_ie.solve(rhs); t+=0.25*dt
    for k in range(1,M):
        rhs=B@w; rhs[-1]+=0.5*dt*c[-1]*(far(R,t)+far(R,t+dt)); w=lu.solve(rhs); t+=dt
    return np.interp(r0,ri,w)
for N,M in [(12000,2000),(24000,4000)]:
    s=solve(lambda r: np.ones_like(r), lambda R,t:1.0,N=N,M=M)
    m2=solve(lambda r: r*r*np.log(r), lambda R,t:R*R*np.log(R)+2*t*np.log(R)+2*t,N=N,M=M)
    print(N,M,"P=",repr(s),"E[1/lnR]=",repr(s/np.log(2)),"E R^2=",repr(m2/np.log(2)))
